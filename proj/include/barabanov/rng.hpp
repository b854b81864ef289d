#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace barabanov {

/// 64-bit linear congruential generator
///   state <- 6364136223846793005 * state + 1442695040888963407  (mod 2^64)
/// (Knuth's MMIX constants). Reports quote only the seed, so every consumer
/// must draw from this exact recurrence.
class Lcg64 {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit Lcg64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ = kMultiplier * state_ + kIncrement;
    return state_;
  }

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one draw per call, the sine branch is
  /// discarded).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace barabanov
