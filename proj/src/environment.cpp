#include "gufic/environment.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

#include "gufic/errors.hpp"

namespace gufic {

SurfaceModel SurfaceModel::plane(const Vec3& point, const Vec3& outward_normal) {
  SurfaceModel s;
  s.kind = SurfaceKind::Plane;
  s.center = point;
  s.normal = outward_normal;
  return s;
}

SurfaceModel SurfaceModel::sphere(const Vec3& c, double r) {
  SurfaceModel s;
  s.kind = SurfaceKind::Sphere;
  s.center = c;
  s.radius = r;
  return s;
}

void SurfaceModel::validate() const {
  if (kind == SurfaceKind::Plane && std::abs(normal.norm() - 1.0) > 1e-12) {
    throw ConfigError("surface normal must be unit length");
  }
  if (kind == SurfaceKind::Sphere && !(radius > 0.0)) {
    throw ConfigError("sphere radius must be positive");
  }
}

void ContactParams::validate() const {
  if (stiffness < 0.0 || damping < 0.0 || tangential_damping < 0.0) {
    throw ConfigError("contact parameters must be non-negative");
  }
}

ContactGeometry contact_geometry(const SurfaceModel& surface, const Vec3& p) {
  if (surface.kind == SurfaceKind::Plane) {
    return {(surface.center - p).dot(surface.normal), surface.normal};
  }
  const Vec3 r = p - surface.center;
  const double dist = r.norm();
  // At the exact center any direction is as good as another.
  const Vec3 n = dist > 0.0 ? Vec3(r / dist) : Vec3(Vec3::UnitZ());
  return {surface.radius - dist, n};
}

SurfaceModel transform_surface(const SurfaceModel& surface, const Pose& h) {
  SurfaceModel out = surface;
  out.center = h.act(surface.center);
  out.normal = h.R * surface.normal;
  return out;
}

Wrench contact_wrench(const SurfaceModel& surface, const Pose& g, const Twist& Vb,
                      const ContactParams& params) {
  const ContactGeometry cg = contact_geometry(surface, g.p);
  if (cg.depth <= 0.0) return Wrench::Zero();

  const Vec3 v = g.R * Vb.head<3>();  // world-frame velocity of the tool point
  const double vn = v.dot(cg.normal);
  const double depth_rate = -vn;
  const double fn = std::max(0.0, params.stiffness * cg.depth + params.damping * depth_rate);
  const Vec3 vt = v - vn * cg.normal;
  const Vec3 f_world = fn * cg.normal - params.tangential_damping * vt;

  Wrench F = Wrench::Zero();
  F.head<3>() = g.R.transpose() * f_world;
  return F;
}

FTSensor::FTSensor(double cutoff_hz, double sample_period)
    : cutoff_(cutoff_hz), dt_(sample_period) {
  if (!(cutoff_hz > 0.0) || !(sample_period > 0.0)) {
    throw ConfigError("sensor cutoff and sample period must be positive");
  }
  if (cutoff_hz >= 0.5 / sample_period) {
    throw ConfigError("sensor cutoff must lie below the Nyquist frequency");
  }
  // Analog prototype H(s) = wc^2 / (s^2 + sqrt(2) wc s + wc^2), s = K (z-1)/(z+1).
  const double K = 2.0 / dt_;
  const double wc = K * std::tan(std::numbers::pi * cutoff_ * dt_);
  const double w2 = wc * wc;
  const double q = std::numbers::sqrt2 * wc * K;
  const double a0 = K * K + q + w2;
  b_ = {w2 / a0, 2.0 * w2 / a0, w2 / a0};
  a_ = {1.0, 2.0 * (w2 - K * K) / a0, (K * K - q + w2) / a0};
}

Wrench FTSensor::step(const Wrench& raw) {
  const Wrench y = b_[0] * raw + z1_;
  z1_ = b_[1] * raw - a_[1] * y + z2_;
  z2_ = b_[2] * raw - a_[2] * y;
  return y;
}

void FTSensor::reset() {
  z1_.setZero();
  z2_.setZero();
}

void FTSensor::settle(const Wrench& value) {
  z2_ = (b_[2] - a_[2]) * value;
  z1_ = (b_[1] - a_[1]) * value + z2_;
}

}  // namespace gufic
