#pragma once

#include <cstdint>
#include <string>

#include "scalefit/types.hpp"

namespace scalefit {

enum class LocationKind { constant, sine, lidar_like };
enum class ScaleKind { constant, linear_increasing, step };
enum class NoiseKind { gaussian, laplace, skewed };

std::string to_string(LocationKind k);
std::string to_string(ScaleKind k);
std::string to_string(NoiseKind k);
LocationKind location_kind_from_string(const std::string& name);
ScaleKind scale_kind_from_string(const std::string& name);
NoiseKind noise_kind_from_string(const std::string& name);

/// Synthetic 1-d regression source y = loc(x) + scale(x) * eps with x uniform
/// on [domain_lo, domain_hi] and closed-form conditional quantile / MAD / IQR
/// oracles. With u = (x - lo) / (hi - lo):
///   location: constant      loc_value
///             sine          loc_amplitude * sin(2 pi u)
///             lidar_like    loc_value, flat for u <= 0.5 then dropping
///                           linearly by loc_amplitude over the second half
///   scale:    constant      scale_base
///             linear        scale_base + scale_slope * (x - lo)
///             step          scale_base, plus scale_slope once u >= 0.5
/// Noise families are standardized to median 0: gaussian N(0,1), laplace with
/// unit rate, and "skewed" = Exp(1) minus its median log 2.
struct GeneratorSpec {
  LocationKind location = LocationKind::sine;
  ScaleKind scale = ScaleKind::constant;
  NoiseKind noise = NoiseKind::gaussian;
  double domain_lo = 0.0;
  double domain_hi = 1.0;
  std::uint64_t seed = 0;
  double loc_value = 0.0;
  double loc_amplitude = 1.0;
  double scale_base = 1.0;
  double scale_slope = 1.0;
};

void validate(const GeneratorSpec& spec);

double location_at(const GeneratorSpec& spec, double x);
double scale_at(const GeneratorSpec& spec, double x);

/// n i.i.d. draws, reproducible bit-for-bit from spec.seed.
Dataset sample(const GeneratorSpec& spec, Index n);

/// Standard normal quantile: Acklam's rational initial guess polished with one
/// Halley step against erfc, accurate to full double precision.
double normal_quantile(double p);

/// Quantile of the standardized noise family.
double noise_quantile(NoiseKind kind, double tau);

/// Median of |eps| for the standardized noise family (the unit-scale MAD).
double noise_mad(NoiseKind kind);

double true_quantile(const GeneratorSpec& spec, double tau, double x);
double true_mad(const GeneratorSpec& spec, double x);
double true_iqr(const GeneratorSpec& spec, double tau1, double tau2, double x);

}  // namespace scalefit
