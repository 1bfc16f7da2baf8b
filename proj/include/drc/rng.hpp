#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace drc {

/// Counter-splittable generator (splitmix64 core). Child streams derived from
/// (master seed, index) are independent of scheduling, which is what makes
/// Monte Carlo results reproducible under any worker count.
struct SplitRng {
  std::uint64_t state;

  explicit SplitRng(std::uint64_t seed) : state(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static SplitRng child(std::uint64_t master, std::uint64_t index) {
    // two finalizer rounds decorrelate adjacent indices
    return SplitRng(mix(mix(master ^ 0x5851f42d4c957f2dULL) + index));
  }

  std::uint64_t next_u64() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// uniform in [0,1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * next_double(); }

  /// Box-Muller; the spare draw is discarded so the call count alone fixes the
  /// stream position.
  double normal(double mean, double std) {
    double u1 = next_double(), u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + std * r * std::cos(6.283185307179586476925287 * u2);
  }

  /// Rejection sampling from N(mean, std) into [lo, hi].
  double truncated_normal(double mean, double std, double lo, double hi,
                          long max_attempts = 1000000) {
    for (long k = 0; k < max_attempts; ++k) {
      double d = normal(mean, std);
      if (d >= lo && d <= hi) return d;
    }
    throw std::runtime_error("truncated normal: degenerate truncation window");
  }
};

}  // namespace drc
