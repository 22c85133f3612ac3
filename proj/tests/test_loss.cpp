#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "scalefit/errors.hpp"
#include "scalefit/loss.hpp"
#include "test_util.hpp"

using namespace scalefit;
using namespace scalefit::testing;

TEST_CASE("pinball values") {
  const LossSpec spec = LossSpec::pinball(0.25);
  CHECK(loss(spec, 1.0, 0.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(loss(spec, 0.0, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(loss(spec, 3.0, 3.0) == 0.0);
  CHECK(loss_d1(spec, 2.0, 0.0) == -0.25);
  CHECK(loss_d1(spec, 0.0, 2.0) == 0.75);
  CHECK(loss_d1(spec, 1.0, 1.0) == 0.0);
}

TEST_CASE("smoothed pinball values") {
  const LossSpec spec = LossSpec::smoothed(0.1);
  CHECK(loss(spec, 0.7, 0.7) == 0.0);
  // Direct high-precision evaluation of (y-t)/2 - eps log(2 Lambda((y-t)/eps))
  // at y-t = 1, eps = 0.1.
  CHECK(loss(spec, 1.0, 0.0) == doctest::Approx(0.43068982183392716).epsilon(1e-12));
  CHECK(loss(spec, 0.0, 1.0) == doctest::Approx(0.43068982183392716).epsilon(1e-12));

  CHECK(loss_d1(spec, 0.3, 0.3) == 0.0);
  CHECK(loss_d1(spec, 1.0, 0.0) == doctest::Approx(-0.49995460213129757).epsilon(1e-12));

  CHECK(loss_d2(spec, 0.5, 0.5) == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(loss_d2(spec, 1.0, 0.0) == doctest::Approx(4.539580773595167e-4).epsilon(1e-10));
  CHECK(loss_d2(LossSpec::smoothed(1.0), 0.0, 0.0) == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("pinball gap values") {
  CHECK(pinball_gap(0.1, 2.0, 2.0) == 0.0);
  CHECK(pinball_gap(0.1, 100.0, 0.0) == doctest::Approx(0.06931471805599453).epsilon(1e-12));
  CHECK(pinball_gap(0.1, 0.1, 0.0) == doctest::Approx(0.03798854930417225).epsilon(1e-12));
  CHECK_THROWS_AS(pinball_gap(0.0, 1.0, 0.0), InputError);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(loss(LossSpec::pinball(0.0), 1.0, 0.0), InputError);
  CHECK_THROWS_AS(loss(LossSpec::pinball(1.0), 1.0, 0.0), InputError);
  CHECK_THROWS_AS(loss(LossSpec::smoothed(0.0), 1.0, 0.0), InputError);
  LossSpec bad_tau = LossSpec::smoothed(0.1);
  bad_tau.tau = 0.4;
  CHECK_THROWS_AS(loss(bad_tau, 1.0, 0.0), InputError);
  CHECK_THROWS_AS(loss_d2(LossSpec::pinball(0.5), 1.0, 0.0), UnsupportedError);
}

TEST_CASE("analytic properties on quasi-random triples") {
  R3Sequence seq;
  const LossSpec pin = LossSpec::pinball(0.5);
  for (int k = 0; k < 2000; ++k) {
    const auto triple = make_triple(seq.next());
    const LossSpec sm = LossSpec::smoothed(triple.eps);
    const double y = triple.y;
    const double t = triple.t;

    // nonnegativity and the pointwise gap sandwich
    const double smoothed = loss(sm, y, t);
    const double pinball = loss(pin, y, t);
    CHECK(smoothed >= 0.0);
    const double gap = pinball_gap(triple.eps, y, t);
    CHECK(gap >= 0.0);
    CHECK(gap <= triple.eps * 0.6931471805599453 + 1e-12);
    CHECK(std::abs((pinball - smoothed) - gap) <= 1e-10 * (1.0 + std::abs(gap)));

    // derivative bound and Lipschitz derivative in y
    CHECK(std::abs(loss_d1(sm, y, t)) <= 0.5);
    const double y2 = t + (y - t) * 0.5;
    CHECK(std::abs(loss_d1(sm, y, t) - loss_d1(sm, y2, t)) <=
          std::abs(y - y2) / triple.eps + 1e-12);

    // logistic re-parameterization, where 4 Lambda (1-Lambda) is representable;
    // 1 - Lambda(r) is evaluated as Lambda(-r) to keep the reference accurate
    const double r = (y - t) / triple.eps;
    if (std::abs(r) <= 30.0) {
      const double lam = 1.0 / (1.0 + std::exp(-r));
      const double lam_c = 1.0 / (1.0 + std::exp(r));
      const double rhs = -(triple.eps / 2.0) * std::log(4.0 * lam * lam_c);
      CHECK(smoothed == doctest::Approx(rhs).epsilon(1e-10));
    }

    // convexity in t
    const double t2 = t + 3.0 * (seq.next().u1 - 0.5);
    const double mid = loss(sm, y, 0.5 * (t + t2));
    CHECK(mid <= 0.5 * loss(sm, y, t) + 0.5 * loss(sm, y, t2) + 1e-12);

    // Lipschitz in both arguments
    const auto p2 = seq.next();
    const double yb = -8.0 + 16.0 * p2.u2;
    const double tb = -8.0 + 16.0 * p2.u3;
    CHECK(std::abs(loss(sm, y, t) - loss(sm, yb, tb)) <=
          0.5 * std::abs(y - yb) + 0.5 * std::abs(t - tb) + 1e-12);
    const double tau = 0.05 + 0.9 * p2.u1;
    const LossSpec pin_tau = LossSpec::pinball(tau);
    const double pin_lip = std::max(tau, 1.0 - tau);
    CHECK(std::abs(loss(pin_tau, y, t) - loss(pin_tau, yb, tb)) <=
          pin_lip * (std::abs(y - yb) + std::abs(t - tb)) + 1e-12);
  }
}

TEST_CASE("gap is nondecreasing in |y - t|") {
  R3Sequence seq;
  for (int k = 0; k < 200; ++k) {
    const auto p = seq.next();
    const double eps = 0.01 + 2.0 * p.u1;
    double prev = -1.0;
    for (int step = 0; step <= 40; ++step) {
      const double gap = pinball_gap(eps, 0.25 * step, 0.0);
      CHECK(gap >= prev - 1e-15);
      prev = gap;
    }
  }
}

TEST_CASE("derivatives match finite differences") {
  R3Sequence seq;
  for (int k = 0; k < 500; ++k) {
    const auto p = seq.next();
    const double y = -4.0 + 8.0 * p.u1;
    const double t = -4.0 + 8.0 * p.u2;
    const double eps = 0.05 + 1.95 * p.u3;
    const LossSpec sm = LossSpec::smoothed(eps);
    const double h = 1e-5 * std::max(1.0, std::abs(t));

    const double fd1 = (loss(sm, y, t + h) - loss(sm, y, t - h)) / (2.0 * h);
    CHECK(loss_d1(sm, y, t) == doctest::Approx(fd1).epsilon(1e-6));
    const double fd2 = (loss_d1(sm, y, t + h) - loss_d1(sm, y, t - h)) / (2.0 * h);
    CHECK(loss_d2(sm, y, t) == doctest::Approx(fd2).epsilon(1e-6));

    // pinball subgradient away from the kink
    if (std::abs(y - t) > 2.0 * h) {
      const LossSpec pin = LossSpec::pinball(0.25 + 0.5 * p.u1);
      const double fd = (loss(pin, y, t + h) - loss(pin, y, t - h)) / (2.0 * h);
      CHECK(loss_d1(pin, y, t) == doctest::Approx(fd).epsilon(1e-9));
    }
  }
}
