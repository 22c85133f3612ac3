#pragma once

#include <vector>

#include "scalefit/solver.hpp"
#include "scalefit/types.hpp"

namespace scalefit {

/// Weighted linear combination sum_j weights[j] * f_j of independently fitted
/// quantile models, one per level in `taus` (strictly increasing). Covers the
/// interquantile-range estimator (weights -1,+1) and the asymmetry estimator
/// (weights +1,-2,+1) as special cases.
struct CombinationModel {
  std::vector<double> taus;
  std::vector<double> weights;
  std::vector<QuantileModel> parts;
};

/// Two-stage conditional-scale estimator: a median fit, then a smoothed-pinball
/// fit on the absolute residuals |y_i - median(x_i)|. Predictions are clamped
/// at zero; the unclamped stage-2 function stays available for diagnostics.
struct MadModel {
  QuantileModel median_model;
  QuantileModel residual_model;
  double epsilon = 0.1;
  bool clip_at_zero = true;
};

QuantileModel fit_quantile(const Dataset& data, double tau, const KernelSpec& kernel,
                           const FitConfig& config);

CombinationModel fit_combination(const Dataset& data, const std::vector<double>& taus,
                                 const std::vector<double>& weights,
                                 const std::vector<KernelSpec>& kernels,
                                 const std::vector<FitConfig>& configs);

MadModel fit_mad(const Dataset& data, const KernelSpec& kernel1, const FitConfig& config1,
                 const KernelSpec& kernel2, const FitConfig& config2, double epsilon);

double predict_scale(const CombinationModel& model, ConstVectorRef x);
double predict_scale(const MadModel& model, ConstVectorRef x);
Vector predict_scale_rows(const CombinationModel& model, ConstMatrixRef xs);
Vector predict_scale_rows(const MadModel& model, ConstMatrixRef xs);

/// Stage-2 value before the clamp at zero.
double predict_unclipped(const MadModel& model, ConstVectorRef x);

/// Grid points where the lower-level curve crosses above the upper one.
struct CrossingReport {
  std::vector<Index> indices;      // offending rows of the probed grid
  std::vector<double> violations;  // q_tau1 - q_tau2 > 0 at those rows
  double max_violation = 0.0;      // 0 when no crossing was found

  bool any() const { return !indices.empty(); }
};

/// Requires a two-part model with weights (-1, +1).
CrossingReport detect_crossing(const CombinationModel& model, ConstMatrixRef grid);

/// Empirical scale risk: mean of L(|y_i - f(x_i)|, g(x_i)) over the sample.
/// The loss must be the 0.5-pinball or a smoothed pinball.
double mad_risk(const Dataset& data, const Predictor& f, const Predictor& g,
                const LossSpec& loss);

}  // namespace scalefit
