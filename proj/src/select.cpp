#include "scalefit/select.hpp"

#include <numeric>

#include "scalefit/errors.hpp"
#include "scalefit/parallel.hpp"
#include "scalefit/rng.hpp"

namespace scalefit {

namespace {

struct FoldSplit {
  Dataset train;
  Dataset heldout;
};

FoldSplit split_fold(const Dataset& data, const std::vector<Index>& assignment, int fold) {
  Index n_held = 0;
  for (const Index a : assignment) n_held += (a == fold);
  FoldSplit out;
  out.train.x.resize(data.n() - n_held, data.dim());
  out.train.y.resize(data.n() - n_held);
  out.heldout.x.resize(n_held, data.dim());
  out.heldout.y.resize(n_held);
  Index ti = 0, hi = 0;
  for (Index i = 0; i < data.n(); ++i) {
    if (assignment[static_cast<std::size_t>(i)] == fold) {
      out.heldout.x.row(hi) = data.x.row(i);
      out.heldout.y[hi++] = data.y[i];
    } else {
      out.train.x.row(ti) = data.x.row(i);
      out.train.y[ti++] = data.y[i];
    }
  }
  return out;
}

}  // namespace

Index pick_best(const std::vector<SelectCell>& cells) {
  Index best = -1;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i].ok) continue;
    if (best < 0) {
      best = static_cast<Index>(i);
      continue;
    }
    const auto& b = cells[static_cast<std::size_t>(best)];
    const auto& c = cells[i];
    const bool better = c.mean_risk < b.mean_risk ||
                        (c.mean_risk == b.mean_risk &&
                         (c.lambda > b.lambda ||
                          (c.lambda == b.lambda && c.gamma < b.gamma)));
    if (better) best = static_cast<Index>(i);
  }
  return best;
}

SelectResult cv_select(const Dataset& data, const SelectConfig& config) {
  if (config.folds < 2) throw InputError("cv_select: folds must be at least 2");
  if (data.n() < config.folds) {
    throw InputError("cv_select: fewer observations than folds");
  }
  if (config.lambdas.empty() || config.gammas.empty()) {
    throw InputError("cv_select: empty hyperparameter grid");
  }
  validate(LossSpec{config.loss, config.tau, config.epsilon});

  // Deterministic fold assignment: seeded shuffle, then round-robin.
  std::vector<Index> perm(static_cast<std::size_t>(data.n()));
  std::iota(perm.begin(), perm.end(), Index{0});
  CounterRng rng(config.seed);
  shuffle_indices(perm, rng);
  std::vector<Index> assignment(static_cast<std::size_t>(data.n()));
  for (std::size_t i = 0; i < perm.size(); ++i) {
    assignment[static_cast<std::size_t>(perm[i])] = static_cast<Index>(i) % config.folds;
  }

  std::vector<FoldSplit> folds;
  folds.reserve(static_cast<std::size_t>(config.folds));
  for (int f = 0; f < config.folds; ++f) folds.push_back(split_fold(data, assignment, f));

  const LossSpec fit_loss{config.loss, config.tau, config.epsilon};
  const LossSpec validation_loss = LossSpec::pinball(config.tau);

  SelectResult result;
  result.cells.resize(config.lambdas.size() * config.gammas.size());
  parallel_for(static_cast<Index>(result.cells.size()), [&](Index cell_index) {
    const std::size_t li = static_cast<std::size_t>(cell_index) / config.gammas.size();
    const std::size_t gi = static_cast<std::size_t>(cell_index) % config.gammas.size();
    SelectCell cell;
    cell.lambda = config.lambdas[li];
    cell.gamma = config.gammas[gi];
    try {
      FitConfig fit_config;
      fit_config.lambda = cell.lambda;
      fit_config.tol = config.tol;
      fit_config.jitter = config.jitter;
      fit_config.max_iter = config.max_iter;
      fit_config.seed = config.seed;
      const KernelSpec kernel = KernelSpec::rbf(cell.gamma);
      double risk_sum = 0.0;
      for (const auto& fold : folds) {
        const QuantileModel model = fit(fold.train, kernel, fit_loss, fit_config);
        const Vector predictions = predict_rows(model, fold.heldout.x);
        double fold_risk = 0.0;
        for (Index i = 0; i < fold.heldout.n(); ++i) {
          fold_risk += loss(validation_loss, fold.heldout.y[i], predictions[i]);
        }
        risk_sum += fold_risk / static_cast<double>(fold.heldout.n());
      }
      cell.mean_risk = risk_sum / static_cast<double>(folds.size());
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
    result.cells[static_cast<std::size_t>(cell_index)] = std::move(cell);
  });
  result.best = pick_best(result.cells);
  return result;
}

}  // namespace scalefit
