#pragma once

#include <vector>

#include "gufic/geometry.hpp"

namespace gufic {

/// The reference pose together with its raw first and second derivatives.
struct ReferenceSample {
  Pose pose;
  Twist Vb = Twist::Zero();  // body velocity vee(g^-1 g_dot)
  Vec3 pdot = Vec3::Zero();
  Vec3 pddot = Vec3::Zero();
  Mat3 Rdot = Mat3::Zero();
  Mat3 Rddot = Mat3::Zero();
};

enum class TrajectoryKind { Circle, Sphere, Waypoints };

/// Closed-form reference trajectories.
///
/// Circle: p = center + radius [cos wt, sin wt, 0], R = rotation (constant).
/// Sphere: theta = theta0 + theta_rate t,
///         p = center + radius [0, sin theta, cos theta],
///         R = rotation * Ry(-theta).
/// Waypoints: natural cubic spline through the positions, rotations along
///         the SO(3) geodesic of each segment with smoothstep timing. Held
///         constant outside [times.front(), times.back()].
///
/// `frame` moves the whole trajectory: the reference is frame * local(t).
struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::Circle;
  Vec3 center = Vec3::Zero();
  double radius = 0.1;
  double omega = 1.0;       // circle angular rate, rad/s
  double theta0 = 0.0;      // sphere start angle, rad
  double theta_rate = 0.0;  // rad/s
  Mat3 rotation = Mat3::Identity();
  std::vector<double> times;
  std::vector<Pose> poses;
  Pose frame;

  static TrajectorySpec circle(const Vec3& center, double radius, double omega, const Mat3& R);
  static TrajectorySpec sphere(const Vec3& center, double radius, double theta0,
                               double theta_rate, const Mat3& R);
  static TrajectorySpec waypoints(std::vector<double> times, std::vector<Pose> poses);

  /// Throws ConfigError for unusable waypoint sets.
  void validate() const;
};

ReferenceSample reference_trajectory(const TrajectorySpec& spec, double t);

struct VelocityFieldParams {
  double zeta = 5.0;  // 1/s
};

/// V_d*(t, g) = Ad_{g^-1 gbar_d} Vbar_d^b - zeta e_G(g, gbar_d).
Twist velocity_field(const Pose& g, const ReferenceSample& ref, const VelocityFieldParams& params);
Twist velocity_field(double t, const Pose& g, const TrajectorySpec& spec,
                     const VelocityFieldParams& params);

/// Total time derivative of velocity_field along a motion with body velocity Vb.
Twist velocity_field_rate(const Pose& g, const Twist& Vb, const ReferenceSample& ref,
                          const VelocityFieldParams& params);
Twist velocity_field_rate(double t, const Pose& g, const Twist& Vb, const TrajectorySpec& spec,
                          const VelocityFieldParams& params);

enum class ForceFrame { Current, Desired };

struct ForceFieldSpec {
  Wrench wrench = Wrench::Zero();
  ForceFrame frame = ForceFrame::Current;
};

/// Desired wrench at g. A wrench given at the desired pose gd is carried to g
/// by the dual adjoint of g_ed^-1, with g_ed = g^-1 gd.
Wrench force_field(const Pose& g, const Pose& gd, const ForceFieldSpec& spec);

}  // namespace gufic
