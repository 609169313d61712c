#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace frameext::rng {

/// SplitMix64 finalizer; statistically strong enough for sketching and
/// sampling, and stateless so draws are indexable.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Combine a seed with a stream id into a derived 64-bit seed.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019ULL));
}

/// Counter-based generator: draw i depends only on (seed, stream, i), so
/// sequences are reproducible regardless of evaluation order or thread count.
class Counter {
 public:
  Counter(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(derive(seed, stream)) {}

  /// Uniform double in (0, 1).
  double uniform(std::uint64_t i) const {
    const std::uint64_t z = mix64(key_ ^ mix64(i));
    return static_cast<double>(z >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  /// Standard normal via Box-Muller on draws (2i, 2i+1).
  double gaussian(std::uint64_t i) const {
    const double u1 = uniform(2 * i);
    const double u2 = uniform(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Complex Gaussian with independent N(0,1) real and imaginary parts,
  /// consuming draws (4i, ..., 4i+3).
  std::complex<double> complex_gaussian(std::uint64_t i) const {
    return {gaussian(2 * i), gaussian(2 * i + 1)};
  }

 private:
  std::uint64_t key_;
};

}  // namespace frameext::rng
