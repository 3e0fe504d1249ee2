// Reproducible RNG: xoshiro256++ engine seeded via splitmix64, with a
// versioned substream derivation so batches can be partitioned across
// workers without changing the output.
//
// Substream scheme (v1, part of the external contract):
//   state of substream k = four successive splitmix64 outputs starting from
//   splitmix64(seed) XOR splitmix64(0x9E3779B97F4A7C15 * (k+1)).
#pragma once

#include <cstdint>
#include <cmath>

namespace templev {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64_next(sm);
  }

  // Substream k of a master seed; independent streams for parallel batches.
  static Rng substream(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t a = seed;
    std::uint64_t b = 0x9E3779B97F4A7C15ULL * (k + 1);
    Rng r(splitmix64_next(a) ^ splitmix64_next(b));
    return r;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0,1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1); never returns an exact 0 (safe under log / division).
  double uniform_open() {
    const double u = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    return u;
  }

  double exponential() { return -std::log(uniform_open()); }

  // Exact Poisson by countdown; lambda is split additively so the countdown
  // product never underflows.
  std::uint64_t poisson(double lambda) {
    std::uint64_t total = 0;
    while (lambda > 60.0) {
      total += poisson_countdown(60.0);
      lambda -= 60.0;
    }
    if (lambda > 0.0) total += poisson_countdown(lambda);
    return total;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t poisson_countdown(double lambda) {
    const double limit = std::exp(-lambda);
    std::uint64_t n = 0;
    double prod = uniform_open();
    while (prod > limit) {
      ++n;
      prod *= uniform_open();
    }
    return n;
  }

  std::uint64_t s_[4];
};

}  // namespace templev
