#pragma once

#include <cstdint>
#include <vector>

namespace idcl {

// Deterministic, platform-independent random stream.
//
// Generator: xoshiro256++ with the 256-bit state expanded from the 64-bit
// seed by splitmix64. No std::*_distribution is used anywhere in the
// project because their output is implementation-defined; every derived
// draw (uniform double, bounded integer, normal, shuffle) is a fixed
// algorithm on top of next_u64, so identical seeds give identical
// sequences on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53 random mantissa bits.
  double next_double();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Uniform integer in [0, bound), unbiased via rejection. bound >= 1.
  std::uint64_t uniform_below(std::uint64_t bound);

  // Standard normal, Box-Muller; pairs of next_double draws, second value
  // cached.
  double normal();

  // Fisher-Yates, high-to-low, driven by uniform_below.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

}  // namespace idcl
