#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scalefit/loss.hpp"
#include "scalefit/solver.hpp"
#include "scalefit/types.hpp"

namespace scalefit {

/// Grid search over (lambda, gamma) by k-fold cross-validated pinball risk.
struct SelectConfig {
  double tau = 0.5;
  LossFamily loss = LossFamily::pinball;  // fit loss; validation risk is pinball
  double epsilon = 0.1;                   // smoothed fits only
  std::vector<double> lambdas;
  std::vector<double> gammas;
  int folds = 5;
  double tol = 1e-8;
  double jitter = 1e-10;
  int max_iter = 0;
  std::uint64_t seed = 1;
};

struct SelectCell {
  double lambda = 0.0;
  double gamma = 0.0;
  double mean_risk = 0.0;
  bool ok = true;
  std::string error;
};

struct SelectResult {
  std::vector<SelectCell> cells;  // row-major over (lambda, gamma)
  Index best = -1;                // -1 when every cell failed
};

/// Tie rule: lowest risk, then larger lambda, then smaller gamma. Returns -1
/// when no cell is usable.
Index pick_best(const std::vector<SelectCell>& cells);

/// Fit failures disqualify the affected cell but never abort the search.
SelectResult cv_select(const Dataset& data, const SelectConfig& config);

}  // namespace scalefit
