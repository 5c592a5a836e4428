#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "gufic/geometry.hpp"

namespace gufic {

/// Parsed JSON plus the source line of every value, keyed by JSON pointer.
/// Every accessor throws ConfigError with "<file>:<line>: <path>: ..." text.
class JsonDoc {
 public:
  static JsonDoc parse(const std::string& text, const std::string& source_name);
  static JsonDoc load(const std::filesystem::path& path);

  const nlohmann::json& root() const { return root_; }
  const std::string& source() const { return source_; }

  /// Line of the value at pointer (or of the closest existing ancestor).
  int line_of(const std::string& pointer) const;

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const;

  bool has(const std::string& pointer) const;
  const nlohmann::json& at(const std::string& pointer) const;

  double number(const std::string& pointer) const;
  double number_or(const std::string& pointer, double fallback) const;
  std::string string(const std::string& pointer) const;
  std::string string_or(const std::string& pointer, const std::string& fallback) const;
  bool boolean_or(const std::string& pointer, bool fallback) const;
  Vec3 vec3(const std::string& pointer) const;
  Vec6 vec6(const std::string& pointer) const;
  Eigen::VectorXd vector(const std::string& pointer) const;
  Mat3 mat3(const std::string& pointer) const;
  Pose pose(const std::string& pointer) const;  // {"position": [...], "rotation": [[...]]}

 private:
  nlohmann::json root_;
  std::string source_;
  std::map<std::string, int> lines_;
};

/// "/a/b/0" -> "a.b[0]" for messages.
std::string pointer_to_path(const std::string& pointer);

}  // namespace gufic
