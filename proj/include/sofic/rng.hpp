#pragma once

#include <cstdint>
#include <vector>

namespace sofic {

/// Deterministic splitmix64 stream. Every randomized routine takes an
/// explicit 64-bit seed and derives independent substreams from
/// (seed, index), so results are reproducible regardless of scheduling
/// and identical across platforms (no std::uniform_int_distribution,
/// whose mapping is implementation-defined).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Substream for trial/item `index`; streams with distinct indices do
  /// not collide for any practical trial count.
  Rng substream(std::uint64_t index) const {
    Rng mix(state_ ^ (0xA0761D6478BD642FULL + index * 0xE7037ED1A0B428DBULL));
    mix.next();
    mix.next();
    return mix;
  }

  /// Uniform integer in [0, n). Lemire's multiply-shift with rejection,
  /// exactly uniform.
  std::uint64_t below(std::uint64_t n) {
    for (;;) {
      std::uint64_t x = next();
      __uint128_t m = static_cast<__uint128_t>(x) * n;
      std::uint64_t lo = static_cast<std::uint64_t>(m);
      if (lo < n) {
        std::uint64_t threshold = (0 - n) % n;
        if (lo < threshold) continue;
      }
      return static_cast<std::uint64_t>(m >> 64);
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Fisher-Yates shuffle of 0..n-1, uniform over all n! orders.
  std::vector<std::uint32_t> random_images(std::uint32_t n) {
    std::vector<std::uint32_t> v(n);
    for (std::uint32_t i = 0; i < n; ++i) v[i] = i;
    for (std::uint32_t i = n; i > 1; --i) {
      std::uint32_t j = static_cast<std::uint32_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
    return v;
  }

private:
  std::uint64_t state_;
};

}  // namespace sofic
