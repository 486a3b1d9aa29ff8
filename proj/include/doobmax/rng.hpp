#pragma once

#include <cstdint>

namespace doobmax {

// SplitMix64: 64-bit state, one multiply-xorshift round per draw.
// Every randomized suite in the project draws from this generator so that a
// (seed, instance index) pair reproduces bit-identically on any platform.
// split() derives an independent stream per instance, which keeps instance
// generation order-free.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 mantissa bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double next_in(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Uniform integer in [lo, hi], inclusive. Modulo bias is irrelevant at the
  // range sizes used here (tens).
  std::uint64_t next_range(std::uint64_t lo, std::uint64_t hi) {
    return lo + next_u64() % (hi - lo + 1);
  }

  // Independent child stream for instance `index`.
  SplitMix64 split(std::uint64_t index) const {
    SplitMix64 child(state_ ^ (0xA3EC647659359ACDull * (index + 1)));
    child.next_u64();
    return child;
  }

 private:
  std::uint64_t state_;
};

}  // namespace doobmax
