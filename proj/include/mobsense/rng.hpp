#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mobsense {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: value(n) = mix(key + n * golden). Any draw can be
/// addressed directly, so a parallel loop gets the same stream as a serial one.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(splitmix64_mix(seed ^ splitmix64_mix(stream + kGolden))) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return splitmix64_mix(key_ + counter * kGolden);
  }

  // In [0, 1), 53 random bits.
  double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // In (0, 1].
  double uniform_open0(std::uint64_t counter) const noexcept {
    return (static_cast<double>(bits(counter) >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Box-Muller pair from counters (c, c + 1).
  void gaussian_pair(std::uint64_t counter, double& z0, double& z1) const noexcept {
    const double r = std::sqrt(-2.0 * std::log(uniform_open0(counter)));
    const double a = 2.0 * std::numbers::pi * uniform(counter + 1);
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
  }

  /// Integer in [0, n), Lemire's multiply-shift (bias below 2^-64 * n).
  std::uint64_t below(std::uint64_t counter, std::uint64_t n) const noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits(counter)) * n) >> 64);
  }

 private:
  std::uint64_t key_;
};

}  // namespace mobsense
