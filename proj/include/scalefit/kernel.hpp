#pragma once

#include <string>

#include "scalefit/types.hpp"

namespace scalefit {

enum class KernelFamily { gaussian_rbf, linear, polynomial };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// k(x,x') = exp(-gamma ||x-x'||^2), x.x', or (x.x' + coef0)^degree.
/// coef0 must be nonnegative so the polynomial kernel stays positive definite.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian_rbf;
  double gamma = 1.0;  // gaussian_rbf only
  int degree = 2;      // polynomial only
  double coef0 = 0.0;  // polynomial only

  static KernelSpec rbf(double gamma) {
    return {KernelFamily::gaussian_rbf, gamma, 2, 0.0};
  }
  static KernelSpec lin() { return {KernelFamily::linear, 1.0, 2, 0.0}; }
  static KernelSpec poly(int degree, double coef0) {
    return {KernelFamily::polynomial, 1.0, degree, coef0};
  }
};

void validate(const KernelSpec& spec);

/// Evaluated n x n kernel matrix. Symmetry is exact: the upper triangle is
/// computed once and mirrored. `jitter` is added to the diagonal.
struct GramMatrix {
  Matrix entries;
  double jitter = 0.0;
};

double eval_kernel(const KernelSpec& spec, ConstVectorRef a, ConstVectorRef b);

/// sup over the input space of sqrt(k(x,x)). Exactly 1 for gaussian_rbf; for
/// the other families this is the empirical supremum over the observed inputs
/// (diagnostic use only), which requires a nonempty input set.
double sup_norm(const KernelSpec& spec, ConstMatrixRef inputs);

GramMatrix gram(const KernelSpec& spec, ConstMatrixRef inputs, double jitter);

}  // namespace scalefit
