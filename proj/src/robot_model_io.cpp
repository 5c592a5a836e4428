#include <string>

#include "gufic/errors.hpp"
#include "gufic/json_doc.hpp"
#include "gufic/robot_model.hpp"

namespace gufic {

namespace {
constexpr const char* kRobotSchema = "gufic-robot/1";
}

RobotDescription load_robot_description(const std::string& path) {
  const JsonDoc doc = JsonDoc::load(path);
  if (doc.string_or("/schema", kRobotSchema) != kRobotSchema) {
    doc.fail("/schema", std::string("unsupported schema, expected ") + kRobotSchema);
  }
  RobotDescription model;
  model.name = doc.string_or("/name", "robot");
  if (doc.has("/base")) model.base = doc.pose("/base");
  if (doc.has("/gravity")) model.gravity = doc.vec3("/gravity");
  model.tool_home = doc.pose("/tool");
  if (!doc.has("/tool/position")) doc.fail("/tool/position", "required field missing");

  const auto& joints = doc.at("/joints");
  const auto& links = doc.at("/links");
  if (!joints.is_array()) doc.fail("/joints", "expected an array");
  if (!links.is_array()) doc.fail("/links", "expected an array");
  if (joints.size() != 6) doc.fail("/joints", "expected exactly 6 joints");
  if (links.size() != joints.size()) doc.fail("/links", "expected one link per joint");

  for (std::size_t i = 0; i < joints.size(); ++i) {
    const std::string jp = "/joints/" + std::to_string(i);
    JointSpec j;
    j.axis = doc.vec3(jp + "/axis");
    if (j.axis.norm() < 1e-9) doc.fail(jp + "/axis", "axis must be nonzero");
    j.axis.normalize();
    j.origin = doc.vec3(jp + "/origin");
    j.armature = doc.number_or(jp + "/armature", 0.0);
    if (j.armature < 0.0) doc.fail(jp + "/armature", "must be >= 0");
    model.joints.push_back(j);

    const std::string lp = "/links/" + std::to_string(i);
    LinkSpec l;
    l.mass = doc.number(lp + "/mass");
    if (!(l.mass > 0.0)) doc.fail(lp + "/mass", "must be > 0");
    l.com = doc.vec3(lp + "/com");
    l.inertia = doc.mat3(lp + "/inertia");
    model.links.push_back(l);
  }

  try {
    validate_description(model);
  } catch (const ConfigError& e) {
    // Field-level checks above cover the common cases; the rest (inertia
    // definiteness) is reported against the links array.
    doc.fail("/links", e.what());
  }
  return model;
}

}  // namespace gufic
