#include "scalefit/estimators.hpp"

#include <cmath>

#include "scalefit/errors.hpp"
#include "scalefit/parallel.hpp"

namespace scalefit {

QuantileModel fit_quantile(const Dataset& data, double tau, const KernelSpec& kernel,
                           const FitConfig& config) {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("fit_quantile: tau must lie in (0, 1)");
  return fit(data, kernel, LossSpec::pinball(tau), config);
}

CombinationModel fit_combination(const Dataset& data, const std::vector<double>& taus,
                                 const std::vector<double>& weights,
                                 const std::vector<KernelSpec>& kernels,
                                 const std::vector<FitConfig>& configs) {
  const std::size_t m = taus.size();
  if (m == 0) throw InputError("fit_combination: needs at least one quantile level");
  if (weights.size() != m || kernels.size() != m || configs.size() != m) {
    throw InputError("fit_combination: taus, weights, kernels and configs must have equal length");
  }
  for (std::size_t j = 1; j < m; ++j) {
    if (!(taus[j - 1] < taus[j])) {
      throw InputError("fit_combination: taus must be strictly increasing");
    }
  }
  bool all_zero = true;
  for (const double w : weights) all_zero = all_zero && w == 0.0;
  if (all_zero) throw InputError("fit_combination: weights must not all be zero");

  CombinationModel model;
  model.taus = taus;
  model.weights = weights;
  model.parts.resize(m);
  parallel_for(static_cast<Index>(m), [&](Index j) {
    model.parts[static_cast<std::size_t>(j)] =
        fit_quantile(data, taus[static_cast<std::size_t>(j)],
                     kernels[static_cast<std::size_t>(j)],
                     configs[static_cast<std::size_t>(j)]);
  });
  return model;
}

MadModel fit_mad(const Dataset& data, const KernelSpec& kernel1, const FitConfig& config1,
                 const KernelSpec& kernel2, const FitConfig& config2, double epsilon) {
  if (!(epsilon > 0.0)) throw InputError("fit_mad: epsilon must be positive");
  MadModel model;
  model.epsilon = epsilon;
  model.clip_at_zero = true;
  model.median_model = fit_quantile(data, 0.5, kernel1, config1);

  Dataset residuals;
  residuals.x = data.x;
  residuals.y = (data.y - predict_rows(model.median_model, data.x)).cwiseAbs();
  model.residual_model = fit(residuals, kernel2, LossSpec::smoothed(epsilon), config2);
  return model;
}

double predict_scale(const CombinationModel& model, ConstVectorRef x) {
  double acc = 0.0;
  for (std::size_t j = 0; j < model.parts.size(); ++j) {
    acc += model.weights[j] * predict(model.parts[j], x);
  }
  return acc;
}

double predict_scale(const MadModel& model, ConstVectorRef x) {
  const double raw = predict(model.residual_model, x);
  return model.clip_at_zero ? std::max(raw, 0.0) : raw;
}

Vector predict_scale_rows(const CombinationModel& model, ConstMatrixRef xs) {
  Vector out = Vector::Zero(xs.rows());
  for (std::size_t j = 0; j < model.parts.size(); ++j) {
    out += model.weights[j] * predict_rows(model.parts[j], xs);
  }
  return out;
}

Vector predict_scale_rows(const MadModel& model, ConstMatrixRef xs) {
  Vector out = predict_rows(model.residual_model, xs);
  if (model.clip_at_zero) out = out.cwiseMax(0.0);
  return out;
}

double predict_unclipped(const MadModel& model, ConstVectorRef x) {
  return predict(model.residual_model, x);
}

CrossingReport detect_crossing(const CombinationModel& model, ConstMatrixRef grid) {
  if (model.parts.size() != 2 || model.weights.size() != 2 ||
      model.weights[0] != -1.0 || model.weights[1] != 1.0) {
    throw InputError("detect_crossing: expects a two-part model with weights (-1, +1)");
  }
  if (grid.rows() == 0) throw InputError("detect_crossing: empty grid");
  CrossingReport report;
  for (Index i = 0; i < grid.rows(); ++i) {
    const double lower = predict(model.parts[0], Vector(grid.row(i)));
    const double upper = predict(model.parts[1], Vector(grid.row(i)));
    const double violation = lower - upper;
    if (violation > 0.0) {
      report.indices.push_back(i);
      report.violations.push_back(violation);
      report.max_violation = std::max(report.max_violation, violation);
    }
  }
  return report;
}

double mad_risk(const Dataset& data, const Predictor& f, const Predictor& g,
                const LossSpec& loss_spec) {
  validate(loss_spec);
  if (loss_spec.tau != 0.5) {
    throw InputError("mad_risk: loss must be the 0.5-pinball or a smoothed pinball");
  }
  if (data.n() == 0) throw InputError("mad_risk: empty sample");
  double acc = 0.0;
  for (Index i = 0; i < data.n(); ++i) {
    const double residual = std::abs(data.y[i] - f(data.x.row(i)));
    acc += loss(loss_spec, residual, g(data.x.row(i)));
  }
  return acc / static_cast<double>(data.n());
}

}  // namespace scalefit
