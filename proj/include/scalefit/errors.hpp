#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace scalefit {

/// Invalid user-supplied arguments: bad spec fields, shape mismatches, empty inputs.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Operation not defined for the given spec (e.g. second derivative of a kink).
struct UnsupportedError : std::logic_error {
  using std::logic_error::logic_error;
};

/// File ingestion or persistence failure.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Model file declares a format version this build does not read.
struct VersionError : IoError {
  using IoError::IoError;
};

/// Model file is truncated or structurally malformed.
struct IntegrityError : IoError {
  using IoError::IoError;
};

/// Numerical breakdown (factorization failure, non-finite values).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Optimizer exhausted its iteration budget before reaching tolerance.
/// Carries the last iterate and residual so callers can inspect or resume.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd last_iterate,
                   double residual, int iterations)
      : std::runtime_error(what),
        last_iterate_(std::move(last_iterate)),
        residual_(residual),
        iterations_(iterations) {}

  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  Eigen::VectorXd last_iterate_;
  double residual_;
  int iterations_;
};

}  // namespace scalefit
