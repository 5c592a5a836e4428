#include "gufic/json_doc.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gufic/errors.hpp"

namespace gufic {

namespace {

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

// Walks text that is already known to be valid JSON and records the line on
// which each value starts.
class LineScanner {
 public:
  LineScanner(const std::string& text, std::map<std::string, int>& lines)
      : s_(text), lines_(lines) {}

  void run() { value(""); }

 private:
  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
      if (s_[i_] == '\n') ++line_;
      ++i_;
    }
  }

  std::string string_token() {
    std::string out;
    ++i_;  // opening quote
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\') {
        out += s_[i_ + 1];
        i_ += 2;
        continue;
      }
      out += s_[i_++];
    }
    ++i_;
    return out;
  }

  void value(const std::string& ptr) {
    skip_ws();
    lines_[ptr] = line_;
    if (i_ >= s_.size()) return;
    const char c = s_[i_];
    if (c == '{') {
      ++i_;
      skip_ws();
      if (s_[i_] == '}') { ++i_; return; }
      while (true) {
        skip_ws();
        const std::string key = string_token();
        skip_ws();
        ++i_;  // colon
        value(ptr + "/" + escape_token(key));
        skip_ws();
        if (s_[i_] == ',') { ++i_; continue; }
        ++i_;  // closing brace
        return;
      }
    }
    if (c == '[') {
      ++i_;
      skip_ws();
      if (s_[i_] == ']') { ++i_; return; }
      for (int idx = 0;; ++idx) {
        value(ptr + "/" + std::to_string(idx));
        skip_ws();
        if (s_[i_] == ',') { ++i_; continue; }
        ++i_;
        return;
      }
    }
    if (c == '"') {
      string_token();
      return;
    }
    while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != '}' && s_[i_] != ']' &&
           !std::isspace(static_cast<unsigned char>(s_[i_]))) {
      ++i_;
    }
  }

  const std::string& s_;
  std::map<std::string, int>& lines_;
  std::size_t i_ = 0;
  int line_ = 1;
};

}  // namespace

std::string pointer_to_path(const std::string& pointer) {
  std::string out;
  std::size_t pos = 1;
  while (pos <= pointer.size() && !pointer.empty()) {
    const std::size_t next = pointer.find('/', pos);
    std::string tok = pointer.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    const bool index = !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char ch) {
      return std::isdigit(static_cast<unsigned char>(ch));
    });
    if (index) out += "[" + tok + "]";
    else out += (out.empty() ? "" : ".") + tok;
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out.empty() ? "<root>" : out;
}

JsonDoc JsonDoc::parse(const std::string& text, const std::string& source_name) {
  JsonDoc doc;
  doc.source_ = source_name;
  try {
    doc.root_ = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Byte offset to line number.
    int line = 1;
    for (std::size_t k = 0; k < text.size() && k < e.byte; ++k) {
      if (text[k] == '\n') ++line;
    }
    throw ConfigError(source_name + ":" + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  LineScanner(text, doc.lines_).run();
  return doc;
}

JsonDoc JsonDoc::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

int JsonDoc::line_of(const std::string& pointer) const {
  std::string p = pointer;
  while (true) {
    auto it = lines_.find(p);
    if (it != lines_.end()) return it->second;
    if (p.empty()) return 1;
    p = p.substr(0, p.rfind('/'));
  }
}

void JsonDoc::fail(const std::string& pointer, const std::string& message) const {
  throw ConfigError(source_ + ":" + std::to_string(line_of(pointer)) + ": " +
                    pointer_to_path(pointer) + ": " + message);
}

bool JsonDoc::has(const std::string& pointer) const {
  return root_.contains(nlohmann::json::json_pointer(pointer));
}

const nlohmann::json& JsonDoc::at(const std::string& pointer) const {
  if (!has(pointer)) fail(pointer, "required field missing");
  return root_.at(nlohmann::json::json_pointer(pointer));
}

double JsonDoc::number(const std::string& pointer) const {
  const auto& v = at(pointer);
  if (!v.is_number()) fail(pointer, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(pointer, "must be finite");
  return x;
}

double JsonDoc::number_or(const std::string& pointer, double fallback) const {
  return has(pointer) ? number(pointer) : fallback;
}

std::string JsonDoc::string(const std::string& pointer) const {
  const auto& v = at(pointer);
  if (!v.is_string()) fail(pointer, "expected a string");
  return v.get<std::string>();
}

std::string JsonDoc::string_or(const std::string& pointer, const std::string& fallback) const {
  return has(pointer) ? string(pointer) : fallback;
}

bool JsonDoc::boolean_or(const std::string& pointer, bool fallback) const {
  if (!has(pointer)) return fallback;
  const auto& v = at(pointer);
  if (!v.is_boolean()) fail(pointer, "expected true or false");
  return v.get<bool>();
}

Eigen::VectorXd JsonDoc::vector(const std::string& pointer) const {
  const auto& v = at(pointer);
  if (!v.is_array()) fail(pointer, "expected an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out(k) = number(pointer + "/" + std::to_string(k));
  return out;
}

Vec3 JsonDoc::vec3(const std::string& pointer) const {
  const Eigen::VectorXd v = vector(pointer);
  if (v.size() != 3) fail(pointer, "expected 3 numbers");
  return v;
}

Vec6 JsonDoc::vec6(const std::string& pointer) const {
  const Eigen::VectorXd v = vector(pointer);
  if (v.size() != 6) fail(pointer, "expected 6 numbers");
  return v;
}

Mat3 JsonDoc::mat3(const std::string& pointer) const {
  const auto& v = at(pointer);
  if (!v.is_array() || v.size() != 3) fail(pointer, "expected a 3x3 array");
  Mat3 M;
  for (int r = 0; r < 3; ++r) M.row(r) = vec3(pointer + "/" + std::to_string(r)).transpose();
  return M;
}

Pose JsonDoc::pose(const std::string& pointer) const {
  Pose g;
  g.p = has(pointer + "/position") ? vec3(pointer + "/position") : Vec3::Zero();
  g.R = has(pointer + "/rotation") ? mat3(pointer + "/rotation") : Mat3::Identity();
  if (!is_rotation(g.R)) fail(pointer + "/rotation", "not a rotation matrix (R^T R = I, det = 1)");
  return g;
}

}  // namespace gufic
