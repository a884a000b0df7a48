#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "peakmdp/mdp.hpp"

namespace peakmdp {

/// SplitMix64. Each call advances the state by 0x9E3779B97F4A7C15 and
/// returns it mixed as
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z ^ (z >> 31)
/// Chosen because it is trivial to reproduce bit-exactly in any language.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Top 53 bits scaled to [0, 1).
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi]; lo + (hi - lo) * uniform01().
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

  /// Unbiased integer in [0, n) by rejecting draws below 2^64 mod n. n > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = (*this)();
      if (r >= threshold) return r % n;
    }
  }

 private:
  std::uint64_t state_;
};

struct GenSpec {
  std::size_t width = 10;
  std::size_t height = 10;
  std::size_t reward_count = 1;
  double value_lo = 1.0;
  double value_hi = 10.0;
  double gamma = 0.9;
  std::uint64_t seed = 0;
};

std::vector<std::string> genspec_violations(const GenSpec& spec);

/// Draws reward cells without replacement by a partial Fisher-Yates shuffle
/// of 0..|S|-1 (swap slot i with i + below(|S| - i)), then one value per
/// reward in draw order. Throws std::invalid_argument for an invalid spec.
Scenario random_scenario(const GenSpec& spec);

}  // namespace peakmdp
