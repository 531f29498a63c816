/**
 * @file errors.hpp
 * @brief Exception hierarchy shared by every cda component.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cda {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Layout or length mismatch between a vector and the model/operator consuming it.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its mathematical domain (e.g. a non-positive nudging coefficient).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A linear solve that has no unique solution.
class SolverError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared while integrating. `subsystem()` names the block
/// that blew up ("truth", "nudged", "sensitivity[i]").
class DivergenceError : public Error {
 public:
  DivergenceError(std::string subsystem, double time)
      : Error("divergence in " + subsystem + " at t=" + std::to_string(time)),
        subsystem_(std::move(subsystem)),
        time_(time) {}

  const std::string& subsystem() const noexcept { return subsystem_; }
  double time() const noexcept { return time_; }

 private:
  std::string subsystem_;
  double time_;
};

}  // namespace cda
