#pragma once

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, counter, index), so a sample can be regenerated without
// replaying the stream and parallel runs consume exactly the same noise as
// sequential ones.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace lookahead {

class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix(mix(seed + kGolden) + stream * kGolden)) {}

  constexpr std::uint64_t bits(std::uint64_t counter, std::uint64_t index) const noexcept {
    return mix(mix(key_ + counter * kGolden) ^ (index * kOdd + kGolden));
  }

  /// Uniform on the open interval (0, 1).
  constexpr double uniform(std::uint64_t counter, std::uint64_t index) const noexcept {
    return (static_cast<double>(bits(counter, index) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on two independent uniforms.
  double normal(std::uint64_t counter, std::uint64_t index) const noexcept {
    const double u1 = uniform(counter, 2 * index);
    const double u2 = uniform(counter, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kOdd = 0xD1B54A32D192ED03ull;

  // splitmix64 finalizer
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

}  // namespace lookahead
