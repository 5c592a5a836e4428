#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gufic {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// vee3 was handed a matrix that is not skew-symmetric.
class NotSkew : public Error {
 public:
  using Error::Error;
};

/// The body Jacobian lost rank; the operational-space terms are undefined.
class NearSingular : public Error {
 public:
  NearSingular(double sigma_min, const std::string& what)
      : Error(what), sigma_min_(sigma_min) {}
  double sigma_min() const { return sigma_min_; }

 private:
  double sigma_min_;
};

/// Inverse kinematics gave up.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// A config or model file violates its schema.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A simulation log lacks a column the audit needs, or has an unknown schema.
class MissingChannel : public Error {
 public:
  using Error::Error;
};

/// Wraps a failure raised while stepping a simulation.
class SimulationError : public Error {
 public:
  SimulationError(std::size_t step, const std::string& what)
      : Error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace gufic
