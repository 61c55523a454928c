#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace abm {

/// Finalizer of the splitmix64 generator; a good 64-bit mixing function.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256** seeded through splitmix64 from a (seed, stream) pair.
///
/// Distinct streams of the same seed are statistically independent, so a
/// batch of simulation runs can key its generators by run index and get the
/// same results no matter in which order (or on which thread) the runs
/// execute. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t x = mix64(seed + 0x9E3779B97F4A7C15ULL) ^
                      mix64(stream + 0xD1B54A32D192ED03ULL);
    bool any = false;
    for (auto& s : state_) {
      x += 0x9E3779B97F4A7C15ULL;
      s = mix64(x);
      any |= (s != 0);
    }
    if (!any) state_[0] = 1;  // all-zero state is invalid for xoshiro
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

  result_type operator()() { return next(); }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double on the open interval (0, 1), 53-bit resolution.
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), n >= 1. Lemire's unbiased method.
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        m = static_cast<unsigned __int128>(next()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Exact Binomial(n, p) draw.
  ///
  /// Counts successes by skipping geometric gaps between them, so the cost is
  /// O(n * min(p, 1-p) + 1) rather than O(n).
  std::int64_t binomial(std::int64_t n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - binomial(n, 1.0 - p);
    const double log_q = std::log1p(-p);
    std::int64_t count = 0;
    std::int64_t pos = 0;
    for (;;) {
      const double gap = std::floor(std::log(uniform01()) / log_q);
      if (gap >= static_cast<double>(n - pos)) break;
      pos += static_cast<std::int64_t>(gap) + 1;
      if (pos > n) break;
      ++count;
    }
    return count;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace abm
