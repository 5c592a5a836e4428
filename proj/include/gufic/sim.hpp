#pragma once

#include <filesystem>
#include <string>

#include "gufic/control.hpp"
#include "gufic/environment.hpp"
#include "gufic/fields.hpp"
#include "gufic/log_table.hpp"
#include "gufic/robot_model.hpp"

namespace gufic {

enum class InitialVelocity { Field, Rest };

struct InitialStateSpec {
  double offset = 0.05;  // start this far behind the reference along its tool z axis, m
  InitialVelocity velocity = InitialVelocity::Field;
  JointVector seed = JointVector::Zero(6);  // IK seed
};

struct ScenarioConfig {
  std::filesystem::path source;  // config file, if loaded from disk
  std::filesystem::path robot_model_path;
  RobotDescription robot;
  ControllerKind controller = ControllerKind::Gufic;
  double duration = 20.0;
  double timestep = 1e-3;
  std::filesystem::path output_dir = "out";

  TrajectorySpec trajectory;
  VelocityFieldParams field;
  SurfaceModel surface;
  ContactParams contact;
  double sensor_cutoff_hz = 5.0;
  ForceFieldSpec force;
  ImpedanceGains gufic_gains;
  ImpedanceGains gic_gains;
  ForcePIDGains pid;
  TankParams force_tank;
  TankParams impedance_tank;
  ForceSource tank_force_source = ForceSource::True;
  ShapingConfig shaping;
  InitialStateSpec initial;
  bool check_field_rate = true;
  double audit_tolerance = 1e-3;

  /// Read-only controller inputs for the selected controller.
  ControlContext context() const;
  /// Throws ConfigError when an invariant is broken.
  void validate() const;
  std::size_t steps() const;
};

/// Parses and validates a scenario file; the robot model path is resolved
/// relative to the config file. Errors name the file, line and field.
ScenarioConfig load_scenario(const std::filesystem::path& path);

ControllerKind parse_controller(const std::string& name);
std::string controller_name(ControllerKind kind);

/// Moves the whole scene (robot base, trajectory, surface) by h.
ScenarioConfig transform_scenario(const ScenarioConfig& config, const Pose& h);

/// Column names of a run log, in order.
const std::vector<std::string>& log_columns();

/// Closed-loop run at a fixed step: contact, sensor, controller and robot are
/// all advanced once per period, joints by semi-implicit Euler. Row k holds
/// the state at t_k and the quantities computed from it; tank levels and g_d'
/// are those in effect during the period. Deterministic.
/// Throws SimulationError (step index attached) when the run breaks down and
/// NoConvergence when the start pose cannot be reached.
LogTable simulate(const ScenarioConfig& config);

/// Start configuration: IK to the offset start pose, velocity from the field.
JointState initial_joint_state(const ScenarioConfig& config);

}  // namespace gufic
