#pragma once

#include <cstdint>
#include <vector>

#include "scalefit/kernel.hpp"
#include "scalefit/loss.hpp"
#include "scalefit/types.hpp"

namespace scalefit {

/// Solver settings for the regularized empirical risk minimization
///   J(beta) = (1/n) sum_i L(y_i, (K beta)_i) + lambda * beta' K beta.
/// `tol` is an absolute stopping tolerance: the dual optimality gap for the
/// pinball family, the max-abs gradient of J for the smoothed family.
/// `max_iter` = 0 picks the family default (10000 coordinate sweeps, 100
/// Newton steps). `seed` drives the randomized coordinate sweep order.
struct FitConfig {
  double lambda = 0.1;
  int max_iter = 0;
  double tol = 1e-8;
  double jitter = 1e-10;
  std::uint64_t seed = 1;
};

void validate(const FitConfig& config);

struct SolverReport {
  int iterations = 0;      // coordinate sweeps or Newton steps
  double residual = 0.0;   // final duality gap / max-abs gradient
  bool converged = false;
  double tol = 0.0;
  int max_iter = 0;
  std::uint64_t seed = 0;
  std::vector<double> objective_trace;  // objective after each sweep / accepted step
};

/// Fitted RKHS function f(x) = sum_i coefficients[i] * k(train_inputs[i], x).
/// There is no intercept term.
struct QuantileModel {
  KernelSpec kernel;
  LossSpec loss;
  double lambda = 0.0;
  double jitter = 0.0;
  Matrix train_inputs;
  Vector coefficients;
  double objective_value = 0.0;
  SolverReport report;
};

/// Minimizes J over representer coefficients. Pinball: coordinate ascent on
/// the box-constrained dual, beta_i in [-(1-tau)/(2 lambda n), tau/(2 lambda n)].
/// Smoothed pinball: damped Newton with backtracking line search and a
/// gradient-step fallback when the Newton system cannot be factorized.
/// Throws ConvergenceError (carrying the last iterate) when the iteration
/// budget runs out, NumericError on factorization breakdown of the Gram matrix.
QuantileModel fit(const Dataset& data, const KernelSpec& kernel,
                  const LossSpec& loss, const FitConfig& config);

double predict(const QuantileModel& model, ConstVectorRef x);
Vector predict_rows(const QuantileModel& model, ConstMatrixRef xs);

/// J(beta) for an arbitrary coefficient vector, with ||f||_H^2 = beta' K beta
/// and K built with config.jitter.
double objective(const Dataset& data, const KernelSpec& kernel,
                 const LossSpec& loss, const FitConfig& config,
                 ConstVectorRef beta);

}  // namespace scalefit
