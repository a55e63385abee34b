#pragma once

// Hand-rolled generators for property tests. SplitMix64 keeps them
// independent of the library's own generator.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <numbers>
#include <vector>

#include "cosz/mask.hpp"

namespace testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  /// Uniform real in [lo, hi).
  double real(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  cosz::CoeffMask mask(int m) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(m + 1));
    for (auto& b : bits) b = static_cast<std::uint8_t>(next() & 1u);
    return cosz::CoeffMask::from_bits(bits);
  }

 private:
  std::uint64_t state_;
};

/// sum_{k in [0, n] minus mask} cos(kx), accumulated in long double.
inline long double reference_f(int n, const cosz::CoeffMask& mask, long double x) {
  long double sum = 0.0L;
  for (int k = 0; k <= n; ++k) {
    if (!mask.bit(k)) sum += std::cos(static_cast<long double>(k) * x);
  }
  return sum;
}

inline constexpr double kPi = std::numbers::pi;

}  // namespace testing
