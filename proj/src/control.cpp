#include "gufic/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "gufic/errors.hpp"

namespace gufic {

namespace {

bool spd(const Eigen::MatrixXd& A) {
  if ((A - A.transpose()).norm() > 1e-9 * std::max(1.0, A.norm())) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  return es.eigenvalues().minCoeff() > 0.0;
}

}  // namespace

void ImpedanceGains::validate() const {
  if (!spd(stiffness.Kp)) throw ConfigError("K_p must be symmetric positive definite");
  if (!spd(stiffness.KR)) throw ConfigError("K_R must be symmetric positive definite");
  if (!spd(Kd)) throw ConfigError("K_d must be symmetric positive definite");
}

void ForcePIDGains::validate() const {
  if (kp < 0.0 || ki < 0.0 || kd < 0.0) throw ConfigError("PID gains must be non-negative");
  if (!(integral_limit > 0.0)) throw ConfigError("PID integral limit must be positive");
}

void TankParams::validate(const char* name) const {
  const std::string n(name);
  if (!(lower > 0.0)) throw ConfigError(n + ": lower limit must be positive");
  if (!(margin > 0.0)) throw ConfigError(n + ": margin must be positive");
  if (!(lower + margin < upper)) throw ConfigError(n + ": need lower + margin < upper");
  if (initial < lower || initial > upper) {
    throw ConfigError(n + ": initial level must lie in [lower, upper]");
  }
}

TankState TankState::with_level(double T) {
  return {std::sqrt(2.0 * std::max(T, kTankFloor))};
}

double switching_alpha(double T, const TankParams& p) {
  if (T >= p.lower + p.margin) return 1.0;
  if (T < p.lower) return 0.0;
  return 0.5 * (1.0 - std::cos((T - p.lower) / p.margin * std::numbers::pi));
}

double switching_alpha_slope(double T, const TankParams& p) {
  if (T >= p.lower + p.margin || T < p.lower) return 0.0;
  const double k = std::numbers::pi / p.margin;
  return 0.5 * k * std::sin((T - p.lower) * k);
}

Wrench force_pid(const Wrench& sensed, const Wrench& Fd, ForcePidState& state,
                 const ForcePIDGains& gains, double dt) {
  const Wrench e = -sensed - Fd;
  Wrench de = Wrench::Zero();
  if (state.started) {
    de = (e - state.previous_error) / dt;
    state.integral += 0.5 * dt * (e + state.previous_error);
    state.integral = state.integral.cwiseMax(-gains.integral_limit).cwiseMin(gains.integral_limit);
  }
  state.previous_error = e;
  state.started = true;
  return -gains.kp * e - gains.kd * de - gains.ki * state.integral + Fd;
}

ForceTankResult force_tank_step(const TankState& state, const Twist& Vb, const Wrench& Ff,
                                const TankParams& params, double dt) {
  ForceTankResult r;
  const double T = state.level();
  r.power = Vb.dot(Ff);
  r.sw.gamma = r.power < 0.0 ? 1.0 : 0.0;
  r.sw.beta = T <= params.upper ? 1.0 : 0.0;
  r.sw.alpha = switching_alpha(T, params);
  r.Ff_prime = r.sw.scale() * Ff;
  r.rate = -r.sw.beta * r.sw.gamma * r.power + r.sw.alpha * (r.sw.gamma - 1.0) * r.power;
  r.next = TankState::with_level(T + r.rate * dt);
  return r;
}

ImpedanceTankResult impedance_tank_step(const TankState& state, const Twist& Vd_star,
                                        const Twist& Vb, const Wrench& Ff_prime,
                                        const Wrench& Fe, const Mat6& Kd,
                                        const TankParams& params, double dt) {
  ImpedanceTankResult r;
  const double T = state.level();
  r.power = Vd_star.dot(Ff_prime + Fe);
  r.sw.gamma = r.power > 0.0 ? 1.0 : 0.0;
  r.sw.beta = T <= params.upper ? 1.0 : 0.0;
  r.sw.alpha = switching_alpha(T, params);
  r.scale = r.sw.scale();
  r.eV_prime = Vb - r.scale * Vd_star;
  r.dissipation = r.eV_prime.dot(Kd * r.eV_prime);
  r.rate = r.sw.beta * (r.sw.gamma * r.power + r.dissipation) +
           r.sw.alpha * (1.0 - r.sw.gamma) * r.power;
  r.scale_rate = (1.0 - r.sw.gamma) * switching_alpha_slope(T, params) * r.rate;
  r.next = TankState::with_level(T + r.rate * dt);
  return r;
}

namespace {

Pose advance(const Pose& gd_prime, const Twist& step) {
  Pose next = gd_prime * exp_se3(step, 1.0);
  if (rotation_drift(next.R) > 1e-9) next = next.orthonormalized();
  return next;
}

}  // namespace

Pose integrate_setpoint(const Pose& gd_prime, const Pose& g, const Twist& Vd_star_prime, double dt) {
  return advance(gd_prime, adjoint(gd_prime.inverse() * g) * Vd_star_prime * dt);
}

Pose integrate_setpoint(const Pose& gd_prime, const Pose& g, const Twist& Vd_star_prime,
                        const Twist& Vd_star_dot_prime, const Twist& Vb, double dt) {
  // d/dt Ad_X V' = Ad_X (V'_dot + ad_{V^b} V') for X = g_d'^-1 g.
  const Mat6 A = adjoint(gd_prime.inverse() * g);
  const Twist rate = A * (Vd_star_dot_prime + small_adjoint(Vb) * Vd_star_prime);
  return advance(gd_prime, A * Vd_star_prime * dt + 0.5 * dt * dt * rate);
}

Wrench gic_wrench(const Pose& g, const Pose& gd, const Twist& Vb, const Twist& Vd_star,
                  const Twist& Vd_star_dot, const OperationalTerms& op, const ImpedanceGains& gains) {
  return op.Mt * Vd_star_dot + op.Ct * Vd_star + op.Gt - elastic_wrench(g, gd, gains.stiffness) -
         gains.Kd * (Vb - Vd_star);
}

double shaping_rho(const Pose& g, const Pose& gd_prime, const ShapingConfig& config) {
  if (!config.enabled) return 1.0;
  const double excess = std::max(0.0, error_function(g, gd_prime) - config.psi0);
  return std::exp(-excess * excess / (config.sigma * config.sigma));
}

GUFICState GUFICState::initial(const ControlContext& ctx, const Pose& gd0) {
  GUFICState s;
  s.force_tank = TankState::with_level(ctx.force_tank.initial);
  s.impedance_tank = TankState::with_level(ctx.impedance_tank.initial);
  s.gd_prime = gd0;
  return s;
}

namespace {

void require_op(const ControlInput& in) {
  if (in.op == nullptr) throw Error("controller called without operational-space terms");
}

JointVector to_torque(const OperationalTerms& op, const Wrench& F) {
  return op.Jb.transpose() * F;
}

}  // namespace

ControlOutput gufic_step(GUFICState& state, const ControlInput& in, const ControlContext& ctx,
                         double dt) {
  require_op(in);
  const OperationalTerms& op = *in.op;
  ControlOutput out;
  out.Tf = state.force_tank.level();
  out.Ti = state.impedance_tank.level();

  out.ref = reference_trajectory(ctx.trajectory, in.t);
  out.Vd_star = velocity_field(in.g, out.ref, ctx.field);
  out.Vd_star_dot = velocity_field_rate(in.g, in.Vb, out.ref, ctx.field);

  out.Fd = force_field(in.g, out.ref.pose, ctx.force);
  out.Ff = force_pid(in.Fe_sensed, out.Fd, state.pid, ctx.pid, dt);
  out.rho = shaping_rho(in.g, state.gd_prime, ctx.shaping);
  const Wrench Ff_shaped = out.rho * out.Ff;

  const ForceTankResult ft = force_tank_step(state.force_tank, in.Vb, Ff_shaped, ctx.force_tank, dt);
  out.Ff_prime = ft.Ff_prime;
  out.force_sw = ft.sw;

  const Wrench& Fe_tank = ctx.tank_force_source == ForceSource::True ? in.Fe_true : in.Fe_sensed;
  const ImpedanceTankResult it = impedance_tank_step(
      state.impedance_tank, out.Vd_star, in.Vb, out.Ff_prime, Fe_tank, ctx.gains.Kd,
      ctx.impedance_tank, dt);
  out.scale_i = it.scale;
  out.impedance_sw = it.sw;
  out.eV_prime = it.eV_prime;
  out.Vd_star_prime = it.scale * out.Vd_star;
  const Twist Vd_star_dot_prime = it.scale * out.Vd_star_dot + it.scale_rate * out.Vd_star;

  out.gd_used = state.gd_prime;
  out.Fi_prime = modified_gic(in.g, state.gd_prime, in.Vb, out.Vd_star_prime, Vd_star_dot_prime,
                              op, ctx.gains);
  out.torque = to_torque(op, out.Ff_prime + out.Fi_prime);

  out.np_force = ft.sw.gamma * (1.0 - ft.sw.beta) * ft.power;
  out.np_damping = (it.sw.beta - 1.0) * it.dissipation;
  out.np_impedance = it.sw.gamma * (it.sw.beta - 1.0) * it.power;

  state.force_tank = ft.next;
  state.impedance_tank = it.next;
  state.force_sw = ft.sw;
  state.impedance_sw = it.sw;
  state.gd_prime = integrate_setpoint(state.gd_prime, in.g, out.Vd_star_prime, Vd_star_dot_prime, in.Vb, dt);
  return out;
}

ControlOutput naive_step(ForcePidState& pid, const ControlInput& in, const ControlContext& ctx,
                         double dt) {
  require_op(in);
  const OperationalTerms& op = *in.op;
  ControlOutput out;
  out.ref = reference_trajectory(ctx.trajectory, in.t);
  out.gd_used = out.ref.pose;
  out.Vd_star = velocity_field(in.g, out.ref, ctx.field);
  out.Vd_star_dot = velocity_field_rate(in.g, in.Vb, out.ref, ctx.field);
  out.Vd_star_prime = out.Vd_star;
  out.eV_prime = in.Vb - out.Vd_star;
  out.Fd = force_field(in.g, out.ref.pose, ctx.force);
  out.Ff = force_pid(in.Fe_sensed, out.Fd, pid, ctx.pid, dt);
  out.Ff_prime = out.Ff;
  out.Fi_prime = gic_wrench(in.g, out.ref.pose, in.Vb, out.Vd_star, out.Vd_star_dot, op, ctx.gains);
  out.torque = to_torque(op, out.Ff + out.Fi_prime);
  return out;
}

ControlOutput gic_step(const ControlInput& in, const ControlContext& ctx) {
  require_op(in);
  const OperationalTerms& op = *in.op;
  const VelocityFieldParams plain{0.0};
  ControlOutput out;
  out.ref = reference_trajectory(ctx.trajectory, in.t);
  out.gd_used = out.ref.pose;
  out.Vd_star = velocity_field(in.g, out.ref, plain);
  out.Vd_star_dot = velocity_field_rate(in.g, in.Vb, out.ref, plain);
  out.Vd_star_prime = out.Vd_star;
  out.eV_prime = in.Vb - out.Vd_star;
  out.Fi_prime = gic_wrench(in.g, out.ref.pose, in.Vb, out.Vd_star, out.Vd_star_dot, op, ctx.gains);
  out.torque = to_torque(op, out.Fi_prime);
  return out;
}

}  // namespace gufic
