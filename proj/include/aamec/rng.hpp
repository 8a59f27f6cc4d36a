#pragma once

#include <cstdint>

// Counter-free splittable RNG. A stream is keyed by an arbitrary tuple of
// 64-bit words mixed through splitmix64; draws from distinct keys are
// independent of the order in which streams are consumed, so parallel and
// sequential snapshot processing produce identical results.

namespace aamec::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {
    // Warm up so nearby keys decorrelate.
    splitmix64(state_);
    splitmix64(state_);
  }

  static Stream keyed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0) {
    std::uint64_t s = seed;
    s = mix(s, a);
    s = mix(s, b);
    s = mix(s, c);
    return Stream(s);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Rejection to avoid modulo bias.
    const std::uint64_t limit = n * ((~0ULL) / n);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

 private:
  static std::uint64_t mix(std::uint64_t s, std::uint64_t w) {
    std::uint64_t t = s ^ (w + 0x9E3779B97F4A7C15ULL);
    splitmix64(t);
    return t;
  }

  std::uint64_t state_;
};

// Exact Poisson sampling: sequential-search inversion for small lambda,
// Hormann's PTRS transformed rejection for large lambda. No normal
// approximation in either regime.
std::uint64_t poisson(Stream& stream, double lambda);

}  // namespace aamec::rng
