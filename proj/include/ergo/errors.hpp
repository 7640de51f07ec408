#pragma once

#include <stdexcept>
#include <string>

#include "ergo/types.hpp"

namespace ergo {

/// A coefficient function returned a non-finite value at a sample point.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, Vec point)
      : std::runtime_error(what), point_(std::move(point)) {}
  const Vec& point() const { return point_; }

 private:
  Vec point_;
};

/// An implicit solve failed to reach the requested residual tolerance.
/// Carries the last residual norm; never swallowed into a clamped state.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, long step = -1)
      : std::runtime_error(what), residual_(residual), step_(step) {}
  double residual() const { return residual_; }
  long step() const { return step_; }  // -1 when not inside a path

  SolverError with_step(long step) const {
    return SolverError(std::string(what()) + " at step " + std::to_string(step),
                       residual_, step);
  }

 private:
  double residual_;
  long step_;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// sigma(x) sigma(x)^T is numerically singular where positive definiteness
/// is required.
class NondegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ergo
