#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scalefit/errors.hpp"
#include "scalefit/select.hpp"
#include "scalefit/synth.hpp"
#include "test_util.hpp"

using namespace scalefit;
using namespace scalefit::testing;

TEST_CASE("pick_best tie rules") {
  std::vector<SelectCell> cells;
  cells.push_back({0.01, 1.0, 0.5, true, ""});
  cells.push_back({0.10, 1.0, 0.5, true, ""});  // same risk, larger lambda wins
  CHECK(pick_best(cells) == 1);

  cells.push_back({0.10, 0.5, 0.5, true, ""});  // same risk and lambda, smaller gamma wins
  CHECK(pick_best(cells) == 2);

  cells.push_back({1.00, 9.0, 0.4, true, ""});  // strictly better risk dominates
  CHECK(pick_best(cells) == 3);

  cells.push_back({2.00, 9.0, 0.1, false, "boom"});  // failed cells never win
  CHECK(pick_best(cells) == 3);

  std::vector<SelectCell> all_failed{{0.1, 1.0, 0.0, false, "x"}, {0.2, 1.0, 0.0, false, "y"}};
  CHECK(pick_best(all_failed) == -1);
  CHECK(pick_best({}) == -1);
}

TEST_CASE("single-cell grid returns that cell") {
  GeneratorSpec gen;
  gen.location = LocationKind::sine;
  gen.scale = ScaleKind::constant;
  gen.scale_base = 0.3;
  gen.seed = 14;
  const Dataset data = sample(gen, 60);

  SelectConfig config;
  config.lambdas = {0.05};
  config.gammas = {2.0};
  config.folds = 3;
  const SelectResult result = cv_select(data, config);
  REQUIRE(result.cells.size() == 1);
  CHECK(result.best == 0);
  CHECK(result.cells[0].ok);
  CHECK(result.cells[0].mean_risk > 0.0);
}

TEST_CASE("grid containing a sensible gamma selects a near-optimal cell") {
  GeneratorSpec gen;
  gen.location = LocationKind::sine;
  gen.scale = ScaleKind::constant;
  gen.scale_base = 0.3;
  gen.noise = NoiseKind::gaussian;
  gen.seed = 15;
  const Dataset data = sample(gen, 200);

  SelectConfig config;
  config.lambdas = {1e-4, 1e-2, 1.0};
  config.gammas = {0.01, 8.0, 5000.0};
  config.folds = 4;
  const SelectResult result = cv_select(data, config);
  REQUIRE(result.best >= 0);
  double min_risk = 1e300;
  int usable = 0;
  for (const auto& cell : result.cells) {
    if (!cell.ok) continue;
    ++usable;
    min_risk = std::min(min_risk, cell.mean_risk);
  }
  CHECK(usable >= 6);  // hard corners may be disqualified, the bulk must fit
  const auto& chosen = result.cells[static_cast<std::size_t>(result.best)];
  CHECK(chosen.mean_risk == min_risk);  // argmin over the usable cells
  // the sensible bandwidth for this generator should be the winner
  CHECK(chosen.gamma == 8.0);
  CHECK(chosen.mean_risk <= 1.05 * min_risk);
}

TEST_CASE("selection is deterministic") {
  GeneratorSpec gen;
  gen.seed = 16;
  const Dataset data = sample(gen, 80);
  SelectConfig config;
  config.lambdas = {0.01, 0.1};
  config.gammas = {1.0, 4.0};
  config.folds = 4;
  const SelectResult a = cv_select(data, config);
  const SelectResult b = cv_select(data, config);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].mean_risk == b.cells[i].mean_risk);
  }
  CHECK(a.best == b.best);
}

TEST_CASE("validation") {
  GeneratorSpec gen;
  gen.seed = 18;
  const Dataset data = sample(gen, 30);
  SelectConfig config;
  config.lambdas = {0.1};
  config.gammas = {1.0};
  config.folds = 1;
  CHECK_THROWS_AS(cv_select(data, config), InputError);
  config.folds = 31;
  CHECK_THROWS_AS(cv_select(data, config), InputError);
  config.folds = 5;
  config.lambdas.clear();
  CHECK_THROWS_AS(cv_select(data, config), InputError);
}

TEST_CASE("smoothed fit loss is accepted") {
  GeneratorSpec gen;
  gen.location = LocationKind::constant;
  gen.scale = ScaleKind::constant;
  gen.scale_base = 0.5;
  gen.seed = 19;
  Dataset data = sample(gen, 60);
  data.y = data.y.cwiseAbs();  // scale-like targets

  SelectConfig config;
  config.loss = LossFamily::smoothed_pinball;
  config.epsilon = 0.1;
  config.lambdas = {0.01, 0.1};
  config.gammas = {1.0};
  config.folds = 3;
  const SelectResult result = cv_select(data, config);
  CHECK(result.best >= 0);
}
