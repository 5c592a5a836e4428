#pragma once

#include <cmath>

#include "gufic/fields.hpp"
#include "gufic/geometry.hpp"
#include "gufic/robot_model.hpp"

namespace gufic {

struct ImpedanceGains {
  StiffnessGains stiffness;
  Mat6 Kd = Mat6::Identity();

  void validate() const;  // ConfigError unless K_p, K_R, K_d are SPD
};

struct ForcePIDGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double integral_limit = 50.0;  // per channel, on the integral of the error

  void validate() const;
};

struct TankParams {
  double upper = 20.0;
  double lower = 0.1;
  double margin = 0.5;
  double initial = 10.0;

  void validate(const char* name) const;
};

inline constexpr double kTankFloor = 1e-6;  // J

/// Energy tank with level T = x^2 / 2.
struct TankState {
  double x = std::sqrt(2.0 * kTankFloor);

  double level() const { return 0.5 * x * x; }
  static TankState with_level(double T);
};

/// gamma, beta in {0, 1}; alpha in [0, 1].
struct Switching {
  double gamma = 1.0;
  double beta = 1.0;
  double alpha = 1.0;

  double scale() const { return gamma + alpha * (1.0 - gamma); }
};

double switching_alpha(double T, const TankParams& params);
/// d(alpha)/dT, zero outside the transition band.
double switching_alpha_slope(double T, const TankParams& params);

struct ForcePidState {
  Wrench integral = Wrench::Zero();
  Wrench previous_error = Wrench::Zero();
  bool started = false;
};

/// F_f = -kp e - kd de/dt - ki int(e) + F_d with e = -sensed - F_d. The first
/// call has no history, so its derivative and integral terms are zero; later
/// calls use a backward difference and the trapezoid rule, with the integral
/// clamped channel-wise to +-integral_limit.
Wrench force_pid(const Wrench& sensed, const Wrench& Fd, ForcePidState& state,
                 const ForcePIDGains& gains, double dt);

struct ForceTankResult {
  Wrench Ff_prime;
  Switching sw;
  double power;  // (V^b)^T F_f
  double rate;   // dT_f/dt
  TankState next;
};

/// One control period of the force tank. The level moves by rate * dt, which
/// is the exact solution of the x dynamics when the power is held over the
/// period, and is floored at kTankFloor.
ForceTankResult force_tank_step(const TankState& state, const Twist& Vb, const Wrench& Ff,
                                const TankParams& params, double dt);

struct ImpedanceTankResult {
  double scale;         // s_i
  double scale_rate;    // ds_i/dt through alpha while gamma holds
  Twist eV_prime;       // V^b - s_i V_d*
  Switching sw;
  double power;         // (V_d*)^T (F_f' + F_e)
  double dissipation;   // (e_V')^T K_d e_V'
  double rate;          // dT_i/dt
  TankState next;
};

ImpedanceTankResult impedance_tank_step(const TankState& state, const Twist& Vd_star,
                                        const Twist& Vb, const Wrench& Ff_prime,
                                        const Wrench& Fe, const Mat6& Kd,
                                        const TankParams& params, double dt);

/// Advances g_d' by the modified field carried into the desired frame:
/// (V_d^b)' = Ad_{g_d'^-1 g} (V_d*)'. Re-projects the rotation when its drift
/// exceeds 1e-9. With the field rate and the tool velocity supplied the step
/// carries the second-order term dt^2/2 d/dt (V_d^b)'.
Pose integrate_setpoint(const Pose& gd_prime, const Pose& g, const Twist& Vd_star_prime, double dt);
Pose integrate_setpoint(const Pose& gd_prime, const Pose& g, const Twist& Vd_star_prime,
                        const Twist& Vd_star_dot_prime, const Twist& Vb, double dt);

/// M~ Vd*_dot + C~ Vd* + G~ - f_g(g, gd) - K_d (V^b - Vd*). Serves both the
/// plain and the modified (primed) impedance law.
Wrench gic_wrench(const Pose& g, const Pose& gd, const Twist& Vb, const Twist& Vd_star,
                  const Twist& Vd_star_dot, const OperationalTerms& op, const ImpedanceGains& gains);

inline Wrench modified_gic(const Pose& g, const Pose& gd_prime, const Twist& Vb,
                           const Twist& Vd_star_prime, const Twist& Vd_star_dot_prime,
                           const OperationalTerms& op, const ImpedanceGains& gains) {
  return gic_wrench(g, gd_prime, Vb, Vd_star_prime, Vd_star_dot_prime, op, gains);
}

struct ShapingConfig {
  bool enabled = false;
  double psi0 = 0.05;
  double sigma = 0.05;
};

/// exp(-max(0, Psi - psi0)^2 / sigma^2), or 1 when disabled.
double shaping_rho(const Pose& g, const Pose& gd_prime, const ShapingConfig& config);

enum class ControllerKind { Gufic, Gic, Naive };
enum class ForceSource { Sensed, True };

/// Everything the controllers read but never modify.
struct ControlContext {
  TrajectorySpec trajectory;
  VelocityFieldParams field;
  ForceFieldSpec force;
  ImpedanceGains gains;
  ForcePIDGains pid;
  TankParams force_tank;
  TankParams impedance_tank;
  ShapingConfig shaping;
  ForceSource tank_force_source = ForceSource::Sensed;
};

struct GUFICState {
  TankState force_tank;
  TankState impedance_tank;
  ForcePidState pid;
  Pose gd_prime;
  Switching force_sw;
  Switching impedance_sw;

  static GUFICState initial(const ControlContext& ctx, const Pose& gd0);
};

/// Robot-side measurements for one control period.
struct ControlInput {
  double t = 0.0;
  Pose g;
  Twist Vb = Twist::Zero();
  Wrench Fe_sensed = Wrench::Zero();
  Wrench Fe_true = Wrench::Zero();  // only read when the tank source is True
  const OperationalTerms* op = nullptr;
};

struct ControlOutput {
  JointVector torque;
  ReferenceSample ref;
  Pose gd_used;            // setpoint of the impedance term this period
  Twist Vd_star = Twist::Zero();
  Twist Vd_star_dot = Twist::Zero();
  Twist Vd_star_prime = Twist::Zero();
  Twist eV_prime = Twist::Zero();
  Wrench Fd = Wrench::Zero();
  Wrench Ff = Wrench::Zero();
  Wrench Ff_prime = Wrench::Zero();
  Wrench Fi_prime = Wrench::Zero();
  double rho = 1.0;
  double scale_i = 1.0;
  Switching force_sw;
  Switching impedance_sw;
  double Tf = 0.0;  // levels at the start of the period
  double Ti = 0.0;
  // The three terms the passivity argument needs to be non-positive.
  double np_force = 0.0;      // gamma_f (1 - beta_f) V^T F_f
  double np_damping = 0.0;    // (beta_i - 1) e'^T K_d e'
  double np_impedance = 0.0;  // gamma_i (beta_i - 1) V_d*^T (F_f' + F_e)
};

/// One GUFIC period: field, force PID, shaping, force tank, impedance tank,
/// impedance law against the current g_d', torque, then g_d' is advanced.
/// `state` is updated in place.
ControlOutput gufic_step(GUFICState& state, const ControlInput& in, const ControlContext& ctx,
                         double dt);

/// Impedance law against the reference plus the unguarded force PID.
ControlOutput naive_step(ForcePidState& pid, const ControlInput& in, const ControlContext& ctx,
                         double dt);

/// Geometric impedance control of the plain trajectory (no field attraction,
/// no force loop).
ControlOutput gic_step(const ControlInput& in, const ControlContext& ctx);

}  // namespace gufic
