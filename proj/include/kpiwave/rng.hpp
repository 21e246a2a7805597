#pragma once

#include <cstdint>

namespace kpiwave {

/// Counter-based generator: value(seed, i) is the SplitMix64 finalizer
/// applied to seed + (i+1)*GOLDEN.  Stateless, so any language reproduces
/// the same stream from (seed, counter); documented in the README.
struct CounterRng {
  std::uint64_t seed;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(seed + (counter + 1) * 0x9E3779B97F4A7C15ull);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [-1, 1).
  double sym(std::uint64_t counter) const { return 2.0 * uniform(counter) - 1.0; }

  /// Derive an independent stream, e.g. one per Monte-Carlo sample.
  CounterRng child(std::uint64_t stream) const { return CounterRng{bits(~stream)}; }
};

} // namespace kpiwave
