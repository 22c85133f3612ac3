#pragma once

// Independent reference computations for the solver tests. These deliberately
// avoid the library's optimization code paths: the objective is evaluated
// with plain loops over eval_kernel, the pinball reference enumerates every
// KKT sign pattern, and the smoothed reference runs accelerated projected
// gradient descent to far below the tolerances being checked.

#include "scalefit/kernel.hpp"
#include "scalefit/loss.hpp"
#include "scalefit/types.hpp"

namespace scalefit::testing {

struct OracleResult {
  Vector beta;
  double objective = 0.0;
};

/// Straightforward second implementation of
/// J(beta) = (1/n) sum_i L(y_i, f(x_i)) + lambda beta' K beta.
double plain_objective(const Dataset& data, const KernelSpec& kernel,
                       const LossSpec& loss, double lambda, double jitter,
                       const Vector& beta);

/// Exact global minimizer of the pinball objective for small n (<= 8): every
/// coordinate is classified as at-lower-bound, at-upper-bound, or residual
/// zero; each of the 3^n patterns yields a candidate from a linear solve and
/// the optimum's own pattern reproduces it exactly.
OracleResult pinball_enumeration_oracle(const Dataset& data, const KernelSpec& kernel,
                                        double tau, double lambda, double jitter);

/// FISTA on the smoothed objective, run to a tiny gradient norm.
OracleResult smoothed_fista_oracle(const Dataset& data, const KernelSpec& kernel,
                                   double epsilon, double lambda, double jitter,
                                   int max_iter = 500000, double grad_tol = 1e-11);

}  // namespace scalefit::testing
