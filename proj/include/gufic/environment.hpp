#pragma once

#include <array>

#include "gufic/geometry.hpp"

namespace gufic {

enum class SurfaceKind { Plane, Sphere };

/// Contact surface in world coordinates. For a plane, `center` is any point
/// on it and `normal` points out of the solid. For a sphere, the tool presses
/// on the outer shell.
struct SurfaceModel {
  SurfaceKind kind = SurfaceKind::Plane;
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double radius = 1.0;

  static SurfaceModel plane(const Vec3& point, const Vec3& outward_normal);
  static SurfaceModel sphere(const Vec3& center, double radius);

  /// Throws ConfigError on a non-unit normal or non-positive radius.
  void validate() const;
};

struct ContactParams {
  double stiffness = 1e5;         // N/m
  double damping = 200.0;         // N s/m
  double tangential_damping = 0.0;  // N s/m

  void validate() const;
};

/// Penetration depth (positive inside) and outward unit normal at the tool
/// point p. The normal is meaningful even when depth <= 0.
struct ContactGeometry {
  double depth;
  Vec3 normal;
};

ContactGeometry contact_geometry(const SurfaceModel& surface, const Vec3& p);

/// Re-expresses a surface in a world frame moved by h.
SurfaceModel transform_surface(const SurfaceModel& surface, const Pose& h);

/// Penalty reaction on the tool point, as a body-frame wrench at g.
/// Normal: max(0, k d + c d_dot) along the outward normal. Tangential:
/// viscous, only while in contact. Point contact, so the torque is zero.
Wrench contact_wrench(const SurfaceModel& surface, const Pose& g, const Twist& Vb,
                      const ContactParams& params);

/// Six-channel second-order Butterworth low-pass, discretized with the
/// bilinear transform (cutoff prewarped) and run in transposed direct form II.
class FTSensor {
 public:
  FTSensor(double cutoff_hz, double sample_period);

  Wrench step(const Wrench& raw);
  void reset();
  /// Loads the state a constant input `value` would have settled to, so the
  /// next step of that input returns it unchanged.
  void settle(const Wrench& value);

  double cutoff_hz() const { return cutoff_; }
  double sample_period() const { return dt_; }
  /// Numerator b0..b2 and denominator 1, a1, a2.
  const std::array<double, 3>& b() const { return b_; }
  const std::array<double, 3>& a() const { return a_; }

 private:
  double cutoff_;
  double dt_;
  std::array<double, 3> b_{};
  std::array<double, 3> a_{};
  Wrench z1_ = Wrench::Zero();
  Wrench z2_ = Wrench::Zero();
};

}  // namespace gufic
