#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "scalefit/estimators.hpp"
#include "scalefit/synth.hpp"
#include "scalefit/types.hpp"

namespace scalefit {

/// Regularization schedule lambda_j(n) = n^(-exponent_j). Construction
/// enforces exponent1, exponent2 > 0 and 2*(exponent1 + exponent2) < 1, so
/// that both sequences vanish while lambda1^2 * lambda2^2 * n still diverges.
class LambdaSchedule {
 public:
  LambdaSchedule(double exponent1, double exponent2);

  double exponent1() const { return exponent1_; }
  double exponent2() const { return exponent2_; }
  double lambda1(Index n) const;
  double lambda2(Index n) const;

 private:
  double exponent1_;
  double exponent2_;
};

/// Mean absolute difference of two functions over the given evaluation points
/// (a Monte Carlo L1 distance when the points are drawn from the input law).
double l1_distance(const Predictor& f, const Predictor& g, ConstMatrixRef points);

/// Empirical 0.5-pinball risk of the oracle pair (true median, true MAD) on
/// the given sample; the reference infimum for the convergence experiments.
double infimal_mad_risk(const GeneratorSpec& spec, const Dataset& sample);

/// Same, on an internally drawn Monte Carlo sample with a fixed evaluation
/// seed.
double infimal_mad_risk(const GeneratorSpec& spec, Index mc_points = 1000000,
                        std::uint64_t eval_seed = 9001);

struct ConvergenceRow {
  Index n = 0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double l1_median = 0.0;    // mean |fhat - f*| on the evaluation sample
  double risk_true_f = 0.0;  // 0.5-pinball risk of (f*, g_fit)
  double risk_est_f = 0.0;   // 0.5-pinball risk of (fhat, g_fit)
  double inf_risk = 0.0;     // oracle-pair reference risk, same sample
  double wall_ms = 0.0;
  bool solver_ok = true;
  std::string error;
};

struct ConvergenceReport {
  GeneratorSpec spec;
  double exponent1 = 0.0;
  double exponent2 = 0.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  Index eval_points = 0;
  std::vector<ConvergenceRow> rows;
};

struct ConvergenceOptions {
  Index eval_points = 200000;
  double tol = 1e-8;
  double jitter = 1e-10;
  int max_iter = 0;  // 0 = solver family default
};

/// For each sample size: draw training data, fit the two-stage MAD estimator
/// with lambdas from the schedule, and record risks, the reference infimum and
/// the L1 distance of the stage-1 median fit, all on one shared evaluation
/// sample so rows are comparable. Solver failures are recorded per row and the
/// experiment continues. Deterministic given (spec, schedule, sizes, seed).
ConvergenceReport run_convergence(const GeneratorSpec& spec, const LambdaSchedule& schedule,
                                  const std::vector<Index>& sizes, double epsilon,
                                  const KernelSpec& kernel, std::uint64_t seed,
                                  const ConvergenceOptions& options = {});

/// One CSV row per sample size, preceded by `#` header comments.
void write_report_csv(std::ostream& out, const ConvergenceReport& report);

}  // namespace scalefit
