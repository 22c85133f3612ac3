#include "scalefit/kernel.hpp"

#include <cmath>

#include "scalefit/errors.hpp"

namespace scalefit {

namespace {

// Squared Euclidean distance accumulated in extended precision before any
// exponentiation, so nearly-coincident points keep a clean zero.
double squared_distance(ConstVectorRef a, ConstVectorRef b) {
  long double acc = 0.0L;
  for (Index i = 0; i < a.size(); ++i) {
    const long double d =
        static_cast<long double>(a[i]) - static_cast<long double>(b[i]);
    acc += d * d;
  }
  return static_cast<double>(acc);
}

double dot(ConstVectorRef a, ConstVectorRef b) {
  long double acc = 0.0L;
  for (Index i = 0; i < a.size(); ++i) {
    acc += static_cast<long double>(a[i]) * static_cast<long double>(b[i]);
  }
  return static_cast<double>(acc);
}

double int_pow(double base, int exponent) {
  double out = 1.0;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

}  // namespace

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian_rbf: return "gaussian_rbf";
    case KernelFamily::linear: return "linear";
    case KernelFamily::polynomial: return "polynomial";
  }
  return "?";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "gaussian_rbf" || name == "rbf") return KernelFamily::gaussian_rbf;
  if (name == "linear") return KernelFamily::linear;
  if (name == "polynomial" || name == "poly") return KernelFamily::polynomial;
  throw InputError("unknown kernel family: " + name);
}

void validate(const KernelSpec& spec) {
  if (spec.family == KernelFamily::gaussian_rbf &&
      !(spec.gamma > 0.0 && std::isfinite(spec.gamma))) {
    throw InputError("gaussian_rbf kernel requires gamma > 0");
  }
  if (spec.family == KernelFamily::polynomial) {
    if (spec.degree < 1) throw InputError("polynomial kernel requires degree >= 1");
    if (!(spec.coef0 >= 0.0)) throw InputError("polynomial kernel requires coef0 >= 0");
  }
}

double eval_kernel(const KernelSpec& spec, ConstVectorRef a, ConstVectorRef b) {
  validate(spec);
  if (a.size() != b.size()) {
    throw InputError("eval_kernel: inputs have different dimensions (" +
                     std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  switch (spec.family) {
    case KernelFamily::gaussian_rbf:
      return std::exp(-spec.gamma * squared_distance(a, b));
    case KernelFamily::linear:
      return dot(a, b);
    case KernelFamily::polynomial:
      return int_pow(dot(a, b) + spec.coef0, spec.degree);
  }
  throw InputError("eval_kernel: unknown kernel family");
}

double sup_norm(const KernelSpec& spec, ConstMatrixRef inputs) {
  validate(spec);
  if (spec.family == KernelFamily::gaussian_rbf) return 1.0;
  if (inputs.rows() == 0) {
    throw InputError("sup_norm: empty input set for a non-RBF kernel family");
  }
  double best = 0.0;
  for (Index i = 0; i < inputs.rows(); ++i) {
    best = std::max(best, eval_kernel(spec, inputs.row(i), inputs.row(i)));
  }
  return std::sqrt(best);
}

GramMatrix gram(const KernelSpec& spec, ConstMatrixRef inputs, double jitter) {
  validate(spec);
  if (!(jitter >= 0.0)) throw InputError("gram: jitter must be nonnegative");
  const Index n = inputs.rows();
  GramMatrix out;
  out.jitter = jitter;
  out.entries.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const double v = eval_kernel(spec, inputs.row(i), inputs.row(j));
      out.entries(i, j) = v;
      out.entries(j, i) = v;
    }
    out.entries(i, i) += jitter;
  }
  return out;
}

}  // namespace scalefit
