#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "gufic/geometry.hpp"
#include "gufic/robot_model.hpp"

namespace gufic::test {

inline std::filesystem::path source_dir() { return GUFIC_SOURCE_DIR; }
inline std::filesystem::path scenario_path(const std::string& name) {
  return source_dir() / "scenarios" / name;
}
inline std::filesystem::path fixture_path(const std::string& name) {
  return source_dir() / "tests" / "fixtures" / name;
}
inline RobotDescription arm() {
  return load_robot_description((source_dir() / "models" / "indy7_like.json").string());
}

/// Fresh scratch directory under the system temp directory.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("gufic_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

class Rng {
 public:
  explicit Rng(unsigned seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

  Vec3 vec3(double scale = 1.0) { return {scale * normal(), scale * normal(), scale * normal()}; }
  Vec6 vec6(double scale = 1.0) {
    Vec6 v;
    for (int i = 0; i < 6; ++i) v(i) = scale * normal();
    return v;
  }
  /// Uniform rotation from a normalized Gaussian quaternion.
  Mat3 rotation() {
    Eigen::Quaterniond q(normal(), normal(), normal(), normal());
    q.normalize();
    return q.toRotationMatrix();
  }
  Pose pose(double translation = 1.0) { return {rotation(), vec3(translation)}; }
  Eigen::VectorXd joints(int n, double lo, double hi) {
    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) q(i) = uniform(lo, hi);
    return q;
  }

 private:
  std::mt19937_64 gen_;
};

/// Truncated power series of the matrix exponential.
inline Mat4 expm_series(const Mat4& X, int terms = 20) {
  Mat4 out = Mat4::Identity();
  Mat4 term = Mat4::Identity();
  for (int k = 1; k < terms; ++k) {
    term = term * X / static_cast<double>(k);
    out += term;
  }
  return out;
}

/// Matrix exponential by scaling and squaring on top of the series, for
/// arguments whose norm is not small.
inline Mat4 expm(const Mat4& X) {
  int s = 0;
  double n = X.norm();
  while (n > 0.5) {
    n *= 0.5;
    ++s;
  }
  Mat4 E = expm_series(X / std::pow(2.0, s), 20);
  for (int i = 0; i < s; ++i) E = E * E;
  return E;
}

/// g * exp(hat6(xi)) computed with the series exponential.
inline Pose perturb(const Pose& g, const Vec6& xi) {
  return Pose::from_matrix(g.matrix() * expm(hat6(xi)));
}

inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor = 1e-12) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

}  // namespace gufic::test
