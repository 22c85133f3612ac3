#include "scalefit/synth.hpp"

#include <cmath>

#include "scalefit/errors.hpp"
#include "scalefit/rng.hpp"

namespace scalefit {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kLog2 = 0.6931471805599453094;
// Median of |Exp(1) - log 2|, the unique root of sinh(m) = 1/2. Derived by
// bisection on the folded CDF to 1e-14 (see the synth test suite).
constexpr double kSkewedMad = 0.4812118250596034;

double unit_position(const GeneratorSpec& spec, double x) {
  return (x - spec.domain_lo) / (spec.domain_hi - spec.domain_lo);
}

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

}  // namespace

std::string to_string(LocationKind k) {
  switch (k) {
    case LocationKind::constant: return "constant";
    case LocationKind::sine: return "sine";
    case LocationKind::lidar_like: return "lidar_like";
  }
  return "?";
}

std::string to_string(ScaleKind k) {
  switch (k) {
    case ScaleKind::constant: return "constant";
    case ScaleKind::linear_increasing: return "linear_increasing";
    case ScaleKind::step: return "step";
  }
  return "?";
}

std::string to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::laplace: return "laplace";
    case NoiseKind::skewed: return "skewed";
  }
  return "?";
}

LocationKind location_kind_from_string(const std::string& name) {
  if (name == "constant") return LocationKind::constant;
  if (name == "sine") return LocationKind::sine;
  if (name == "lidar_like" || name == "lidar") return LocationKind::lidar_like;
  throw InputError("unknown location kind: " + name);
}

ScaleKind scale_kind_from_string(const std::string& name) {
  if (name == "constant") return ScaleKind::constant;
  if (name == "linear_increasing" || name == "linear") return ScaleKind::linear_increasing;
  if (name == "step") return ScaleKind::step;
  throw InputError("unknown scale kind: " + name);
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "gaussian") return NoiseKind::gaussian;
  if (name == "laplace") return NoiseKind::laplace;
  if (name == "skewed") return NoiseKind::skewed;
  throw InputError("unknown noise kind: " + name);
}

void validate(const GeneratorSpec& spec) {
  if (!(spec.domain_lo < spec.domain_hi)) {
    throw InputError("generator domain requires lo < hi");
  }
  const double width = spec.domain_hi - spec.domain_lo;
  bool positive = false;
  switch (spec.scale) {
    case ScaleKind::constant:
      positive = spec.scale_base > 0.0;
      break;
    case ScaleKind::linear_increasing:
      positive = spec.scale_base > 0.0 && spec.scale_base + spec.scale_slope * width > 0.0;
      break;
    case ScaleKind::step:
      positive = spec.scale_base > 0.0 && spec.scale_base + spec.scale_slope > 0.0;
      break;
  }
  if (!positive) {
    throw InputError("generator scale function must be strictly positive on the domain");
  }
}

double location_at(const GeneratorSpec& spec, double x) {
  const double u = unit_position(spec, x);
  switch (spec.location) {
    case LocationKind::constant:
      return spec.loc_value;
    case LocationKind::sine:
      return spec.loc_amplitude * std::sin(2.0 * kPi * u);
    case LocationKind::lidar_like:
      return u <= 0.5 ? spec.loc_value
                      : spec.loc_value - 2.0 * spec.loc_amplitude * (u - 0.5);
  }
  return 0.0;
}

double scale_at(const GeneratorSpec& spec, double x) {
  switch (spec.scale) {
    case ScaleKind::constant:
      return spec.scale_base;
    case ScaleKind::linear_increasing:
      return spec.scale_base + spec.scale_slope * (x - spec.domain_lo);
    case ScaleKind::step:
      return unit_position(spec, x) < 0.5 ? spec.scale_base
                                          : spec.scale_base + spec.scale_slope;
  }
  return 0.0;
}

Dataset sample(const GeneratorSpec& spec, Index n) {
  validate(spec);
  if (n < 1) throw InputError("sample: n must be at least 1");
  CounterRng rng(spec.seed);
  Dataset data;
  data.x.resize(n, 1);
  data.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double x = spec.domain_lo + (spec.domain_hi - spec.domain_lo) * rng.next_uniform01();
    const double eps = noise_quantile(spec.noise, rng.next_uniform01());
    data.x(i, 0) = x;
    data.y[i] = location_at(spec, x) + scale_at(spec, x) * eps;
  }
  return data;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("normal_quantile: p must lie in (0, 1)");
  // Acklam's rational approximation (relative error < 1.15e-9).
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step against the erfc-based CDF brings the result to full
  // double precision.
  const double e = gaussian_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double noise_quantile(NoiseKind kind, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("noise_quantile: tau must lie in (0, 1)");
  switch (kind) {
    case NoiseKind::gaussian:
      return normal_quantile(tau);
    case NoiseKind::laplace:
      return tau < 0.5 ? std::log(2.0 * tau) : -std::log(2.0 * (1.0 - tau));
    case NoiseKind::skewed:
      return -std::log1p(-tau) - kLog2;
  }
  return 0.0;
}

double noise_mad(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::gaussian:
      return 0.6744897501960817;  // normal quantile of 3/4
    case NoiseKind::laplace:
      return kLog2;
    case NoiseKind::skewed:
      return kSkewedMad;
  }
  return 0.0;
}

double true_quantile(const GeneratorSpec& spec, double tau, double x) {
  validate(spec);
  return location_at(spec, x) + scale_at(spec, x) * noise_quantile(spec.noise, tau);
}

double true_mad(const GeneratorSpec& spec, double x) {
  validate(spec);
  return scale_at(spec, x) * noise_mad(spec.noise);
}

double true_iqr(const GeneratorSpec& spec, double tau1, double tau2, double x) {
  validate(spec);
  if (!(tau1 < tau2)) throw InputError("true_iqr: requires tau1 < tau2");
  return scale_at(spec, x) *
         (noise_quantile(spec.noise, tau2) - noise_quantile(spec.noise, tau1));
}

}  // namespace scalefit
