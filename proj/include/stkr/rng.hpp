#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace stkr {

/// Counter-based pseudo-random generator (SplitMix64 over a 64-bit counter).
/// Output is a pure function of (seed, counter), so sequences are identical
/// on every platform and independent streams can be derived cheaply.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), counter_(0) {}

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound). Rejection-sampled so the result is exactly
  /// uniform and reproducible regardless of platform.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % bound;
  }

  /// Uniform double in [0, 1) with 53 bits of entropy.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (always consumes two draws).
  double next_gaussian() {
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  /// Derive an independent stream, e.g. one per trial.
  Rng spawn(std::uint64_t stream) const {
    Rng child(seed_ ^ (0x6a09e667f3bcc909ULL + stream * 0x3c6ef372fe94f82bULL));
    return child;
  }

  /// Fisher-Yates shuffle of 0..n-1.
  std::vector<std::int64_t> permutation(std::int64_t n) {
    std::vector<std::int64_t> p(n);
    for (std::int64_t i = 0; i < n; ++i) p[i] = i;
    for (std::int64_t i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::int64_t>(next_below(static_cast<std::uint64_t>(i + 1)));
      std::swap(p[i], p[j]);
    }
    return p;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

}  // namespace stkr
