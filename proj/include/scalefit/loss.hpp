#pragma once

#include <string>

namespace scalefit {

enum class LossFamily { pinball, smoothed_pinball };

std::string to_string(LossFamily family);
LossFamily loss_family_from_string(const std::string& name);

/// Pinball loss at level tau, or its epsilon-smoothed variant
///   L_eps(y,t) = (y-t)/2 - eps * log(2 * Lambda((y-t)/eps)),
/// with Lambda the logistic sigmoid. The smoothed family is only defined as a
/// smoothing of the tau = 0.5 pinball loss.
struct LossSpec {
  LossFamily family = LossFamily::pinball;
  double tau = 0.5;
  double epsilon = 0.1;  // smoothed_pinball only

  static LossSpec pinball(double tau) {
    return {LossFamily::pinball, tau, 0.1};
  }
  static LossSpec smoothed(double epsilon) {
    return {LossFamily::smoothed_pinball, 0.5, epsilon};
  }
};

void validate(const LossSpec& spec);

double loss(const LossSpec& spec, double y, double t);

/// Derivative in t. For the pinball family this is a subgradient element:
/// -tau when y > t, (1-tau) when y < t, 0 at the kink.
double loss_d1(const LossSpec& spec, double y, double t);

/// Second derivative in t; smoothed family only (the pinball loss has none).
double loss_d2(const LossSpec& spec, double y, double t);

/// Pointwise gap L_{0.5-pin}(y,t) - L_eps(y,t), evaluated in closed form as
/// eps * log(2 * Lambda(|y-t|/eps)) to avoid cancellation. Lies in
/// [0, eps*log 2].
double pinball_gap(double epsilon, double y, double t);

}  // namespace scalefit
