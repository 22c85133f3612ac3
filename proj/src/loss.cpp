#include "scalefit/loss.hpp"

#include <cmath>

#include "scalefit/errors.hpp"

namespace scalefit {

namespace {

constexpr double kLog2 = 0.6931471805599453094;

double logistic(double r) {
  if (r >= 0.0) return 1.0 / (1.0 + std::exp(-r));
  const double e = std::exp(r);
  return e / (1.0 + e);
}

// log(2 * Lambda(s)) for s >= 0, i.e. log 2 - log1p(exp(-s)). Never overflows.
double log_two_lambda_nonneg(double s) {
  return kLog2 - std::log1p(std::exp(-s));
}

}  // namespace

std::string to_string(LossFamily family) {
  return family == LossFamily::pinball ? "pinball" : "smoothed_pinball";
}

LossFamily loss_family_from_string(const std::string& name) {
  if (name == "pinball") return LossFamily::pinball;
  if (name == "smoothed_pinball" || name == "smoothed") return LossFamily::smoothed_pinball;
  throw InputError("unknown loss family: " + name);
}

void validate(const LossSpec& spec) {
  if (!(spec.tau > 0.0 && spec.tau < 1.0)) {
    throw InputError("loss: tau must lie in (0, 1)");
  }
  if (spec.family == LossFamily::smoothed_pinball) {
    if (!(spec.epsilon > 0.0 && std::isfinite(spec.epsilon))) {
      throw InputError("smoothed_pinball loss requires epsilon > 0");
    }
    if (spec.tau != 0.5) {
      throw InputError("smoothed_pinball loss is defined only for tau = 0.5");
    }
  }
}

double loss(const LossSpec& spec, double y, double t) {
  validate(spec);
  const double diff = y - t;
  if (spec.family == LossFamily::pinball) {
    return diff >= 0.0 ? spec.tau * diff : (1.0 - spec.tau) * (t - y);
  }
  // L_eps is symmetric in y-t; with s = |y-t|/eps it equals
  // eps * (s/2 - log(2 Lambda(s))).
  const double s = std::abs(diff) / spec.epsilon;
  const double v = spec.epsilon * (0.5 * s - log_two_lambda_nonneg(s));
  return v > 0.0 ? v : 0.0;
}

double loss_d1(const LossSpec& spec, double y, double t) {
  validate(spec);
  const double diff = y - t;
  if (spec.family == LossFamily::pinball) {
    if (diff > 0.0) return -spec.tau;
    if (diff < 0.0) return 1.0 - spec.tau;
    return 0.0;
  }
  return 0.5 - logistic(diff / spec.epsilon);
}

double loss_d2(const LossSpec& spec, double y, double t) {
  validate(spec);
  if (spec.family != LossFamily::smoothed_pinball) {
    throw UnsupportedError("loss_d2 is defined for the smoothed_pinball family only");
  }
  const double s = std::abs(y - t) / spec.epsilon;
  const double e = std::exp(-s);
  return e / ((1.0 + e) * (1.0 + e)) / spec.epsilon;
}

double pinball_gap(double epsilon, double y, double t) {
  if (!(epsilon > 0.0)) throw InputError("pinball_gap: epsilon must be positive");
  const double v = epsilon * log_two_lambda_nonneg(std::abs(y - t) / epsilon);
  return v > 0.0 ? v : 0.0;
}

}  // namespace scalefit
