#pragma once

#include <cmath>

#include "scalefit/rng.hpp"
#include "scalefit/types.hpp"

namespace scalefit::testing {

/// Roberts' R3 low-discrepancy sequence: additive recurrence with powers of
/// the generalized golden ratio (the root of x^4 = x + 1).
class R3Sequence {
 public:
  struct Point {
    double u1, u2, u3;
  };

  Point next() {
    s1_ = frac(s1_ + kA1);
    s2_ = frac(s2_ + kA2);
    s3_ = frac(s3_ + kA3);
    return {s1_, s2_, s3_};
  }

 private:
  static double frac(double v) { return v - std::floor(v); }
  static constexpr double kG = 1.2207440846057596;
  static constexpr double kA1 = 1.0 / kG;
  static constexpr double kA2 = 1.0 / (kG * kG);
  static constexpr double kA3 = 1.0 / (kG * kG * kG);
  double s1_ = 0.5, s2_ = 0.5, s3_ = 0.5;
};

struct LossTriple {
  double y, t, eps;
};

/// Maps an R3 point onto y,t in [-8, 8] and eps log-uniform in [1e-3, 10].
inline LossTriple make_triple(const R3Sequence::Point& p) {
  return {-8.0 + 16.0 * p.u1, -8.0 + 16.0 * p.u2,
          std::exp(std::log(1e-3) + p.u3 * (std::log(10.0) - std::log(1e-3)))};
}

inline Dataset random_dataset(CounterRng& rng, Index n, Index d, double x_span = 2.0,
                              double y_span = 2.0) {
  Dataset data;
  data.x.resize(n, d);
  data.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) data.x(i, j) = x_span * rng.next_uniform01();
    data.y[i] = y_span * (2.0 * rng.next_uniform01() - 1.0);
  }
  return data;
}

}  // namespace scalefit::testing
