#pragma once

#include <cstdint>
#include <vector>

#include "scalefit/types.hpp"

namespace scalefit {

/// Counter-based generator: draw i is the SplitMix64 finalizer applied to
/// seed + (i+1) * golden-gamma. Stateless apart from the counter, so streams
/// are reproducible bit-for-bit on any platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1); safe as input to inverse CDFs.
  double next_uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  /// Uniform integer in [0, bound) by rejection-free modulo of the top bits.
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// One SplitMix64 round; used to derive independent stream seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed ^ (salt * 0xD1B54A32D192ED03ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministic Fisher-Yates shuffle driven by CounterRng.
inline void shuffle_indices(std::vector<Index>& indices, CounterRng& rng) {
  for (std::size_t i = indices.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(indices[i - 1], indices[j]);
  }
}

}  // namespace scalefit
