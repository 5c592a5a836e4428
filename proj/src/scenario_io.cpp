#include <cmath>

#include "gufic/errors.hpp"
#include "gufic/json_doc.hpp"
#include "gufic/sim.hpp"

namespace gufic {

namespace {

constexpr const char* kScenarioSchema = "gufic-scenario/1";

double positive(const JsonDoc& doc, const std::string& ptr) {
  const double v = doc.number(ptr);
  if (!(v > 0.0)) doc.fail(ptr, "must be positive");
  return v;
}

double non_negative(const JsonDoc& doc, const std::string& ptr, double fallback) {
  const double v = doc.number_or(ptr, fallback);
  if (v < 0.0) doc.fail(ptr, "must be non-negative");
  return v;
}

Mat6 damping_matrix(const JsonDoc& doc, const std::string& ptr) {
  const auto& v = doc.at(ptr);
  if (v.is_number()) return doc.number(ptr) * Mat6::Identity();
  return doc.vec6(ptr).asDiagonal();
}

ImpedanceGains impedance_gains(const JsonDoc& doc, const std::string& ptr) {
  ImpedanceGains g;
  g.stiffness = StiffnessGains::diagonal(doc.vec3(ptr + "/kp_translation"),
                                         doc.vec3(ptr + "/kp_rotation"));
  g.Kd = damping_matrix(doc, ptr + "/kd");
  try {
    g.validate();
  } catch (const ConfigError& e) {
    doc.fail(ptr, e.what());
  }
  return g;
}

// A tank field is either one number shared by both tanks or
// {"force": x, "impedance": y}.
double tank_field(const JsonDoc& doc, const std::string& name, const char* which) {
  const std::string ptr = "/tanks/" + name;
  const auto& v = doc.at(ptr);
  if (v.is_object()) return doc.number(ptr + "/" + which);
  return doc.number(ptr);
}

TankParams tank_params(const JsonDoc& doc, const char* which) {
  TankParams p;
  p.initial = tank_field(doc, "initial", which);
  p.lower = tank_field(doc, "lower", which);
  p.upper = tank_field(doc, "upper", which);
  p.margin = tank_field(doc, "margin", which);
  try {
    p.validate(which);
  } catch (const ConfigError& e) {
    doc.fail("/tanks", e.what());
  }
  return p;
}

TrajectorySpec trajectory(const JsonDoc& doc) {
  const std::string kind = doc.string("/trajectory/kind");
  TrajectorySpec spec;
  if (kind == "circle") {
    spec = TrajectorySpec::circle(doc.vec3("/trajectory/center"), positive(doc, "/trajectory/radius"),
                                  doc.number("/trajectory/omega"),
                                  doc.pose("/trajectory").R);
  } else if (kind == "sphere") {
    spec = TrajectorySpec::sphere(doc.vec3("/trajectory/center"), positive(doc, "/trajectory/radius"),
                                  doc.number("/trajectory/theta0"),
                                  doc.number("/trajectory/theta_rate"), doc.pose("/trajectory").R);
  } else if (kind == "waypoints") {
    const auto& samples = doc.at("/trajectory/samples");
    if (!samples.is_array()) doc.fail("/trajectory/samples", "expected an array");
    std::vector<double> times;
    std::vector<Pose> poses;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::string p = "/trajectory/samples/" + std::to_string(i);
      times.push_back(doc.number(p + "/t"));
      poses.push_back(doc.pose(p));
      if (!doc.has(p + "/position")) doc.fail(p + "/position", "required field missing");
    }
    spec = TrajectorySpec::waypoints(std::move(times), std::move(poses));
  } else {
    doc.fail("/trajectory/kind", "expected circle, sphere or waypoints");
  }
  if (doc.has("/trajectory/frame")) spec.frame = doc.pose("/trajectory/frame");
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    doc.fail("/trajectory", e.what());
  }
  return spec;
}

SurfaceModel surface(const JsonDoc& doc) {
  const std::string kind = doc.string("/surface/kind");
  SurfaceModel s;
  if (kind == "plane") {
    const Vec3 n = doc.vec3("/surface/normal");
    if (!(n.norm() > 0.0)) doc.fail("/surface/normal", "must be non-zero");
    s = SurfaceModel::plane(doc.vec3("/surface/point"), n.normalized());
  } else if (kind == "sphere") {
    s = SurfaceModel::sphere(doc.vec3("/surface/center"), positive(doc, "/surface/radius"));
  } else {
    doc.fail("/surface/kind", "expected plane or sphere");
  }
  return s;
}

}  // namespace

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  const JsonDoc doc = JsonDoc::load(path);
  if (!doc.root().is_object()) doc.fail("", "expected a JSON object");
  const std::string schema = doc.string("/schema");
  if (schema != kScenarioSchema) {
    doc.fail("/schema", "unsupported schema '" + schema + "' (expected " + kScenarioSchema + ")");
  }

  ScenarioConfig c;
  c.source = path;
  const std::filesystem::path base_dir = path.parent_path();
  c.robot_model_path = base_dir / doc.string("/robot_model");
  if (!std::filesystem::exists(c.robot_model_path)) {
    doc.fail("/robot_model", "file not found: " + c.robot_model_path.string());
  }
  c.robot = load_robot_description(c.robot_model_path.string());

  try {
    c.controller = parse_controller(doc.string_or("/controller", "gufic"));
  } catch (const ConfigError& e) {
    doc.fail("/controller", e.what());
  }
  c.duration = doc.number("/duration");
  if (c.duration < 0.0) doc.fail("/duration", "must be non-negative");
  c.timestep = doc.has("/timestep") ? positive(doc, "/timestep") : 1e-3;
  if (c.duration > 0.0 && c.duration < c.timestep) doc.fail("/duration", "shorter than one timestep");
  c.output_dir = doc.string_or("/output_dir", "out");

  c.trajectory = trajectory(doc);
  c.field.zeta = positive(doc, "/velocity_field/zeta");

  c.surface = surface(doc);
  c.contact.stiffness = non_negative(doc, "/contact/stiffness", 1e5);
  c.contact.damping = non_negative(doc, "/contact/damping", 200.0);
  c.contact.tangential_damping = non_negative(doc, "/contact/tangential_damping", 0.0);
  c.sensor_cutoff_hz = doc.has("/sensor/cutoff_hz") ? positive(doc, "/sensor/cutoff_hz") : 5.0;
  if (c.sensor_cutoff_hz >= 0.5 / c.timestep) doc.fail("/sensor/cutoff_hz", "above Nyquist");

  c.force.wrench = doc.vec6("/force_field/wrench");
  const std::string frame = doc.string_or("/force_field/frame", "current");
  if (frame == "current") c.force.frame = ForceFrame::Current;
  else if (frame == "desired") c.force.frame = ForceFrame::Desired;
  else doc.fail("/force_field/frame", "expected current or desired");

  c.gufic_gains = impedance_gains(doc, "/gains/gufic");
  c.gic_gains = doc.has("/gains/gic") ? impedance_gains(doc, "/gains/gic") : c.gufic_gains;
  c.pid.kp = non_negative(doc, "/gains/force_pid/kp", 0.0);
  c.pid.ki = non_negative(doc, "/gains/force_pid/ki", 0.0);
  c.pid.kd = non_negative(doc, "/gains/force_pid/kd", 0.0);
  c.pid.integral_limit = doc.has("/gains/force_pid/integral_limit")
                             ? positive(doc, "/gains/force_pid/integral_limit")
                             : 50.0;

  doc.at("/tanks");
  c.force_tank = tank_params(doc, "force");
  c.impedance_tank = tank_params(doc, "impedance");
  const std::string src = doc.string_or("/tanks/force_source", "true");
  if (src == "true") c.tank_force_source = ForceSource::True;
  else if (src == "sensed") c.tank_force_source = ForceSource::Sensed;
  else doc.fail("/tanks/force_source", "expected true or sensed");

  c.shaping.enabled = doc.boolean_or("/shaping/enabled", false);
  c.shaping.psi0 = non_negative(doc, "/shaping/psi0", 0.05);
  c.shaping.sigma = doc.has("/shaping/sigma") ? positive(doc, "/shaping/sigma") : 0.05;

  c.initial.offset = doc.number_or("/initial_state/offset", 0.05);
  const std::string vel = doc.string_or("/initial_state/velocity", "field");
  if (vel == "field") c.initial.velocity = InitialVelocity::Field;
  else if (vel == "rest") c.initial.velocity = InitialVelocity::Rest;
  else doc.fail("/initial_state/velocity", "expected field or rest");
  if (doc.has("/initial_state/seed")) {
    c.initial.seed = doc.vector("/initial_state/seed");
    if (c.initial.seed.size() != 6) doc.fail("/initial_state/seed", "expected 6 numbers");
  }

  if (doc.has("/frame")) {
    c = transform_scenario(c, doc.pose("/frame"));
  }
  c.check_field_rate = doc.boolean_or("/checks/field_rate", true);
  c.audit_tolerance = doc.has("/audit/tolerance") ? positive(doc, "/audit/tolerance") : 1e-3;

  try {
    c.validate();
  } catch (const ConfigError& e) {
    doc.fail("", e.what());
  }
  return c;
}

}  // namespace gufic
