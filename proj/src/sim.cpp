#include "gufic/sim.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "gufic/energy_audit.hpp"
#include "gufic/errors.hpp"

namespace gufic {

namespace {

constexpr double kFieldRateStep = 1e-4;   // s, central difference for the rate check
constexpr double kFieldRateFloor = 1e-4;  // denominator floor of the relative error

std::vector<std::string> make_columns() {
  std::vector<std::string> c{"t"};
  auto add6 = [&c](const std::string& prefix, const char* const* names) {
    for (int i = 0; i < 6; ++i) c.push_back(prefix + names[i]);
  };
  auto add_pose = [&c](const std::string& prefix) {
    for (int r = 1; r <= 3; ++r) {
      for (int k = 1; k <= 3; ++k) c.push_back(prefix + "R" + std::to_string(r) + std::to_string(k));
    }
    c.push_back(prefix + "px");
    c.push_back(prefix + "py");
    c.push_back(prefix + "pz");
  };
  static const char* const joints[] = {"1", "2", "3", "4", "5", "6"};
  static const char* const twist[] = {"vx", "vy", "vz", "wx", "wy", "wz"};
  static const char* const wrench[] = {"fx", "fy", "fz", "tx", "ty", "tz"};
  add6("q", joints);
  add6("qd", joints);
  add_pose("g_");
  add_pose("ref_");
  add_pose("gdp_");
  add6("Vb_", twist);
  add6("Vds_", twist);
  add6("Vdsp_", twist);
  add6("Fe_", wrench);
  add6("Fes_", wrench);
  add6("Fd_", wrench);
  add6("Ff_", wrench);
  add6("Ffp_", wrench);
  add6("Fip_", wrench);
  add6("tau", joints);
  for (const char* n : {"gamma_f", "beta_f", "alpha_f", "gamma_i", "beta_i", "alpha_i", "s_i",
                        "rho", "Tf", "Ti", "psi", "kinetic", "potential", "S_tot", "port_power",
                        "port_work", "port_power_sensed", "np_force", "np_damping",
                        "np_impedance", "field_rate_err", "depth"}) {
    c.push_back(n);
  }
  return c;
}

void push_pose(std::vector<double>& row, const Pose& g) {
  for (int r = 0; r < 3; ++r) {
    for (int k = 0; k < 3; ++k) row.push_back(g.R(r, k));
  }
  for (int i = 0; i < 3; ++i) row.push_back(g.p(i));
}

void push6(std::vector<double>& row, const Eigen::VectorXd& v) {
  for (int i = 0; i < 6; ++i) row.push_back(v(i));
}

double field_rate_error(double t, const Pose& g, const Twist& Vb, const TrajectorySpec& traj,
                        const VelocityFieldParams& field) {
  const double h = kFieldRateStep;
  const Twist an = velocity_field_rate(t, g, Vb, traj, field);
  const Twist fp = velocity_field(t + h, g * exp_se3(Vb, h), traj, field);
  const Twist fm = velocity_field(t - h, g * exp_se3(Vb, -h), traj, field);
  const Twist fd = (fp - fm) / (2.0 * h);
  return (fd - an).norm() / std::max(an.norm(), kFieldRateFloor);
}

}  // namespace

ControllerKind parse_controller(const std::string& name) {
  if (name == "gufic") return ControllerKind::Gufic;
  if (name == "gic") return ControllerKind::Gic;
  if (name == "naive") return ControllerKind::Naive;
  throw ConfigError("unknown controller '" + name + "' (expected gufic, gic or naive)");
}

std::string controller_name(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::Gufic: return "gufic";
    case ControllerKind::Gic: return "gic";
    case ControllerKind::Naive: return "naive";
  }
  return "?";
}

ControlContext ScenarioConfig::context() const {
  ControlContext ctx;
  ctx.trajectory = trajectory;
  ctx.field = field;
  ctx.force = force;
  ctx.gains = controller == ControllerKind::Gic ? gic_gains : gufic_gains;
  ctx.pid = pid;
  ctx.force_tank = force_tank;
  ctx.impedance_tank = impedance_tank;
  ctx.shaping = shaping;
  ctx.tank_force_source = tank_force_source;
  return ctx;
}

void ScenarioConfig::validate() const {
  if (!(timestep > 0.0)) throw ConfigError("timestep must be positive");
  // Zero duration is allowed and yields a header-only log.
  if (duration < 0.0 || (duration > 0.0 && duration < timestep))
    throw ConfigError("duration must be 0 or at least one timestep");
  if (robot.dof() != 6) throw ConfigError("robot model must have six joints");
  validate_description(robot);
  trajectory.validate();
  surface.validate();
  contact.validate();
  if (!(field.zeta > 0.0)) throw ConfigError("velocity_field.zeta must be positive");
  gufic_gains.validate();
  gic_gains.validate();
  pid.validate();
  force_tank.validate("tanks (force)");
  impedance_tank.validate("tanks (impedance)");
  if (shaping.enabled && !(shaping.sigma > 0.0)) throw ConfigError("shaping.sigma must be positive");
  if (initial.seed.size() != 6) throw ConfigError("initial_state.seed needs six entries");
  if (!std::isfinite(initial.offset)) throw ConfigError("initial_state.offset must be finite");
  FTSensor(sensor_cutoff_hz, timestep);  // throws on a bad cutoff
}

std::size_t ScenarioConfig::steps() const {
  return static_cast<std::size_t>(std::llround(duration / timestep));
}

ScenarioConfig transform_scenario(const ScenarioConfig& config, const Pose& h) {
  ScenarioConfig out = config;
  out.robot = transform_description(config.robot, h);
  out.trajectory.frame = h * config.trajectory.frame;
  out.surface = transform_surface(config.surface, h);
  return out;
}

const std::vector<std::string>& log_columns() {
  static const std::vector<std::string> cols = make_columns();
  return cols;
}

JointState initial_joint_state(const ScenarioConfig& cfg) {
  const ReferenceSample ref0 = reference_trajectory(cfg.trajectory, 0.0);
  const Pose start = ref0.pose * Pose(Mat3::Identity(), Vec3(0.0, 0.0, -cfg.initial.offset));
  JointState s;
  s.q = inverse_kinematics(cfg.robot, start, cfg.initial.seed);
  s.qdot = JointVector::Zero(6);
  if (cfg.initial.velocity == InitialVelocity::Field) {
    const Pose g = forward_kinematics(cfg.robot, s.q);
    const VelocityFieldParams field =
        cfg.controller == ControllerKind::Gic ? VelocityFieldParams{0.0} : cfg.field;
    const Twist V = velocity_field(g, ref0, field);
    const Mat6 Jb = body_jacobian(cfg.robot, s.q);
    s.qdot = Jb.partialPivLu().solve(V);
  }
  return s;
}

LogTable simulate(const ScenarioConfig& cfg) {
  cfg.validate();
  LogTable log(log_columns());
  const std::size_t n = cfg.steps();
  if (n == 0) return log;

  const double dt = cfg.timestep;
  const ControlContext ctx = cfg.context();
  const StiffnessGains& K = ctx.gains.stiffness;
  const VelocityFieldParams field =
      cfg.controller == ControllerKind::Gic ? VelocityFieldParams{0.0} : cfg.field;

  JointState js = initial_joint_state(cfg);
  FTSensor sensor(cfg.sensor_cutoff_hz, dt);
  GUFICState gstate = GUFICState::initial(ctx, reference_trajectory(cfg.trajectory, 0.0).pose);
  ForcePidState naive_pid;

  std::vector<double> row;
  row.reserve(log.cols());
  double port_work = 0.0;
  double prev_power = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    try {
      const Pose g = forward_kinematics(cfg.robot, js.q);
      const DynamicsTerms joint = joint_space_terms(cfg.robot, js.q, js.qdot);
      const OperationalTerms op = operational_terms(cfg.robot, js.q, js.qdot, joint);
      const Twist Vb = op.Jb * js.qdot;

      const Wrench Fe = contact_wrench(cfg.surface, g, Vb, cfg.contact);
      if (k == 0) sensor.settle(Fe);
      const Wrench Fe_sensed = sensor.step(Fe);

      ControlInput in;
      in.t = t;
      in.g = g;
      in.Vb = Vb;
      in.Fe_sensed = Fe_sensed;
      in.Fe_true = Fe;
      in.op = &op;

      ControlOutput out;
      switch (cfg.controller) {
        case ControllerKind::Gufic: out = gufic_step(gstate, in, ctx, dt); break;
        case ControllerKind::Naive: out = naive_step(naive_pid, in, ctx, dt); break;
        case ControllerKind::Gic: out = gic_step(in, ctx); break;
      }
      if (!out.torque.allFinite()) throw Error("controller produced a non-finite torque");

      const JointVector qdd = forward_dynamics(joint, op.Jb, js.qdot, out.torque, Fe);

      const double kinetic = kinetic_energy(out.eV_prime, op.Mt);
      const double potential = potential_energy(g, out.gd_used, K);
      const double S_tot = total_storage(kinetic, potential, out.Tf, out.Ti);
      const double power = Vb.dot(Fe);
      if (k > 0) port_work += 0.5 * (power + prev_power) * dt;
      prev_power = power;
      const double rate_err =
          cfg.check_field_rate ? field_rate_error(t, g, Vb, cfg.trajectory, field) : 0.0;

      row.clear();
      row.push_back(t);
      push6(row, js.q);
      push6(row, js.qdot);
      push_pose(row, g);
      push_pose(row, out.ref.pose);
      push_pose(row, out.gd_used);
      push6(row, Vb);
      push6(row, out.Vd_star);
      push6(row, out.Vd_star_prime);
      push6(row, Fe);
      push6(row, Fe_sensed);
      push6(row, out.Fd);
      push6(row, out.Ff);
      push6(row, out.Ff_prime);
      push6(row, out.Fi_prime);
      push6(row, out.torque);
      for (double v : {out.force_sw.gamma, out.force_sw.beta, out.force_sw.alpha,
                       out.impedance_sw.gamma, out.impedance_sw.beta, out.impedance_sw.alpha,
                       out.scale_i, out.rho, out.Tf, out.Ti, error_function(g, out.gd_used),
                       kinetic, potential, S_tot, power, port_work, Vb.dot(Fe_sensed),
                       out.np_force, out.np_damping, out.np_impedance, rate_err,
                       contact_geometry(cfg.surface, g.p).depth}) {
        row.push_back(v);
      }
      log.append(row);

      js.qdot += qdd * dt;
      js.q += js.qdot * dt;
      if (!js.q.allFinite() || !js.qdot.allFinite()) throw Error("joint state diverged");
    } catch (const SimulationError&) {
      throw;
    } catch (const NoConvergence&) {
      throw;
    } catch (const Error& e) {
      std::ostringstream os;
      os << "step " << k << " (t = " << t << " s): " << e.what();
      throw SimulationError(k, os.str());
    }
  }
  return log;
}

}  // namespace gufic
