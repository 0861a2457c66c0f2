#pragma once

#include <cmath>
#include <cstdint>

namespace foe {

// Deterministic 64-bit generator used everywhere randomness is needed, so
// that noise realizations and benchmark instances are reproducible across
// platforms and implementations. The algorithm is SplitMix64 (Steele,
// Lea & Flood; the reference mixer from Vigna's splitmix64.c):
//
//   state += 0x9e3779b97f4a7c15
//   z = state
//   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   output z ^ (z >> 31)
//
// Uniform doubles take the top 53 bits: u = ((next() >> 11) + 1) * 2^-53,
// which lies in (0, 1] so log(u) below is always finite.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in (0, 1].
  double next_unit() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
  }

 private:
  std::uint64_t state_;
};

// Standard normal stream via the Box-Muller transform. Each pair of uniform
// draws (u1, u2) yields the pair
//
//   z0 = sqrt(-2 ln u1) * cos(2 pi u2),
//   z1 = sqrt(-2 ln u1) * sin(2 pi u2),
//
// consumed in that order. This pairing is part of the documented noise
// contract: pixel 2i takes z0, pixel 2i+1 takes z1 of the i-th pair.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = rng_.next_unit();
    const double u2 = rng_.next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  SplitMix64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// One-shot mix of two words, used to derive per-item seeds from a base seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  SplitMix64 rng(seed ^ (0x632be59bd9b4e019ULL * (salt + 1)));
  return rng.next();
}

}  // namespace foe
