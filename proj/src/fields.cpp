#include "gufic/fields.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "gufic/errors.hpp"

namespace gufic {

namespace {

// Log map on SO(3), valid away from a half turn.
Vec3 log_so3(const Mat3& R) {
  const double c = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
  const double th = std::acos(c);
  const Vec3 axis_sin{R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1)};
  if (th < 1e-8) return 0.5 * axis_sin;
  return th / (2.0 * std::sin(th)) * axis_sin;
}

// Natural cubic spline second derivatives for one coordinate.
std::vector<double> spline_moments(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  std::vector<double> m(n, 0.0);
  if (n < 3) return m;
  const std::size_t k = n - 2;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(k));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
    const auto r = static_cast<Eigen::Index>(i - 1);
    A(r, r) = 2.0 * (h0 + h1);
    if (i > 1) A(r, r - 1) = h0;
    if (i + 2 < n) A(r, r + 1) = h1;
    rhs(r) = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
  }
  const Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
  for (std::size_t i = 1; i + 1 < n; ++i) m[i] = sol(static_cast<Eigen::Index>(i - 1));
  return m;
}

ReferenceSample local_circle(const TrajectorySpec& s, double t) {
  ReferenceSample r;
  const double c = std::cos(s.omega * t), sn = std::sin(s.omega * t);
  r.pose = {s.rotation, s.center + s.radius * Vec3(c, sn, 0.0)};
  r.pdot = s.radius * s.omega * Vec3(-sn, c, 0.0);
  r.pddot = -s.radius * s.omega * s.omega * Vec3(c, sn, 0.0);
  return r;
}

ReferenceSample local_sphere(const TrajectorySpec& s, double t) {
  ReferenceSample r;
  const double th = s.theta0 + s.theta_rate * t;
  const double w = s.theta_rate;
  const double c = std::cos(th), sn = std::sin(th);
  const Mat3 R = s.rotation * rot_y(-th);
  const Mat3 Ey = hat3(Vec3::UnitY());
  r.pose = {R, s.center + s.radius * Vec3(0.0, sn, c)};
  r.pdot = s.radius * w * Vec3(0.0, c, -sn);
  r.pddot = -s.radius * w * w * Vec3(0.0, sn, c);
  // d/dtheta Ry(-theta) = -Ry(-theta) Ey.
  r.Rdot = -w * R * Ey;
  r.Rddot = w * w * R * Ey * Ey;
  return r;
}

ReferenceSample local_waypoints(const TrajectorySpec& s, double t) {
  ReferenceSample r;
  const auto& T = s.times;
  const std::size_t n = T.size();
  if (t <= T.front() || t >= T.back()) {
    r.pose = t <= T.front() ? s.poses.front() : s.poses.back();
    return r;
  }
  const std::size_t i =
      static_cast<std::size_t>(std::upper_bound(T.begin(), T.end(), t) - T.begin()) - 1;
  const double h = T[i + 1] - T[i];
  const double a = (T[i + 1] - t) / h, b = (t - T[i]) / h;

  for (int d = 0; d < 3; ++d) {
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = s.poses[k].p(d);
    const std::vector<double> m = spline_moments(T, y);
    r.pose.p(d) = a * y[i] + b * y[i + 1] +
                  ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
    r.pdot(d) = (y[i + 1] - y[i]) / h +
                (-(3.0 * a * a - 1.0) * m[i] + (3.0 * b * b - 1.0) * m[i + 1]) * h / 6.0;
    r.pddot(d) = a * m[i] + b * m[i + 1];
  }

  const Mat3& R0 = s.poses[i].R;
  const Vec3 w = log_so3(R0.transpose() * s.poses[i + 1].R);
  const double sig = b * b * (3.0 - 2.0 * b);
  const double sdot = 6.0 * b * (1.0 - b) / h;
  const double sddot = (6.0 - 12.0 * b) / (h * h);
  const Mat3 W = hat3(w);
  const Mat3 R = R0 * exp_so3(sig * w);
  r.pose.R = R;
  r.Rdot = R * W * sdot;
  r.Rddot = R * (W * W * sdot * sdot + W * sddot);
  return r;
}

}  // namespace

TrajectorySpec TrajectorySpec::circle(const Vec3& c, double radius, double omega, const Mat3& R) {
  TrajectorySpec s;
  s.kind = TrajectoryKind::Circle;
  s.center = c;
  s.radius = radius;
  s.omega = omega;
  s.rotation = R;
  return s;
}

TrajectorySpec TrajectorySpec::sphere(const Vec3& c, double radius, double theta0,
                                      double theta_rate, const Mat3& R) {
  TrajectorySpec s;
  s.kind = TrajectoryKind::Sphere;
  s.center = c;
  s.radius = radius;
  s.theta0 = theta0;
  s.theta_rate = theta_rate;
  s.rotation = R;
  return s;
}

TrajectorySpec TrajectorySpec::waypoints(std::vector<double> times, std::vector<Pose> poses) {
  TrajectorySpec s;
  s.kind = TrajectoryKind::Waypoints;
  s.times = std::move(times);
  s.poses = std::move(poses);
  return s;
}

void TrajectorySpec::validate() const {
  if (!is_rotation(frame.R)) throw ConfigError("trajectory frame rotation is not orthonormal");
  if (kind != TrajectoryKind::Waypoints) {
    if (!is_rotation(rotation)) throw ConfigError("trajectory rotation is not orthonormal");
    return;
  }
  if (times.size() < 2 || times.size() != poses.size()) {
    throw ConfigError("waypoints need at least two samples with one pose per time");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw ConfigError("waypoint times must increase strictly");
  }
  for (std::size_t i = 0; i < poses.size(); ++i) {
    if (!is_rotation(poses[i].R)) throw ConfigError("waypoint rotation is not orthonormal");
    if (i > 0) {
      const Mat3 D = poses[i - 1].R.transpose() * poses[i].R;
      if (D.trace() < -0.99) throw ConfigError("consecutive waypoint rotations differ by a half turn");
    }
  }
}

ReferenceSample reference_trajectory(const TrajectorySpec& spec, double t) {
  ReferenceSample r;
  switch (spec.kind) {
    case TrajectoryKind::Circle: r = local_circle(spec, t); break;
    case TrajectoryKind::Sphere: r = local_sphere(spec, t); break;
    case TrajectoryKind::Waypoints: r = local_waypoints(spec, t); break;
  }
  // The body velocity is unchanged by a left transform; the raw derivatives rotate.
  r.Vb.head<3>() = r.pose.R.transpose() * r.pdot;
  r.Vb.tail<3>() = vee3(r.pose.R.transpose() * r.Rdot);
  const Pose& h = spec.frame;
  r.pose = h * r.pose;
  r.pdot = h.R * r.pdot;
  r.pddot = h.R * r.pddot;
  r.Rdot = h.R * r.Rdot;
  r.Rddot = h.R * r.Rddot;
  return r;
}

Twist velocity_field(const Pose& g, const ReferenceSample& ref, const VelocityFieldParams& params) {
  return adjoint(g.inverse() * ref.pose) * ref.Vb - params.zeta * gcev(g, ref.pose);
}

Twist velocity_field(double t, const Pose& g, const TrajectorySpec& spec,
                     const VelocityFieldParams& params) {
  return velocity_field(g, reference_trajectory(spec, t), params);
}

Twist velocity_field_rate(const Pose& g, const Twist& Vb, const ReferenceSample& ref,
                          const VelocityFieldParams& params) {
  const Mat3& R = g.R;
  const Vec3& p = g.p;
  const Mat3& Rd = ref.pose.R;
  const Vec3& pd = ref.pose.p;
  const Vec3 v = Vb.head<3>();
  const Mat3 Wb = hat3(Vb.tail<3>());

  // Feedforward part A = Ad_{g^-1} W, with W the spatial velocity of the
  // reference: W = [pd_dot - Om pd; Om^v], Om = Rd_dot Rd^T.
  const Mat3 Om = ref.Rdot * Rd.transpose();
  const Mat3 Om_dot = ref.Rddot * Rd.transpose() + ref.Rdot * ref.Rdot.transpose();
  Twist W, W_dot;
  W.head<3>() = ref.pdot - Om * pd;
  W.tail<3>() = vee3(Om);
  W_dot.head<3>() = ref.pddot - Om_dot * pd - Om * ref.pdot;
  W_dot.tail<3>() = vee3(Om_dot);
  const Mat6 Ad_ginv = adjoint(g.inverse());
  const Twist A = Ad_ginv * W;
  const Twist A_dot = small_adjoint(A) * Vb + Ad_ginv * W_dot;

  // Rate of the error vector.
  Vec6 eG_dot;
  eG_dot.head<3>() = -Wb * R.transpose() * (p - pd) + v - R.transpose() * ref.pdot;
  const Mat3 D = ref.Rdot.transpose() * R + Rd.transpose() * R * Wb + Wb * R.transpose() * Rd -
                 R.transpose() * ref.Rdot;
  eG_dot.tail<3>() = vee3(D);

  return A_dot - params.zeta * eG_dot;
}

Twist velocity_field_rate(double t, const Pose& g, const Twist& Vb, const TrajectorySpec& spec,
                          const VelocityFieldParams& params) {
  return velocity_field_rate(g, Vb, reference_trajectory(spec, t), params);
}

Wrench force_field(const Pose& g, const Pose& gd, const ForceFieldSpec& spec) {
  if (spec.frame == ForceFrame::Current) return spec.wrench;
  const Pose g_ed = g.inverse() * gd;
  return coadjoint_transform(g_ed.inverse(), spec.wrench);
}

}  // namespace gufic
