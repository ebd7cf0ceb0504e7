#pragma once

#include <cstdint>

#include "grassmin/matrix.hpp"

namespace grassmin {

/// xoshiro256++ seeded through splitmix64. Self-contained so that
/// seeded runs reproduce bit-for-bit across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// uniform in [0, 1)
  double uniform();
  /// standard normal (Box-Muller, second value cached)
  double normal();

 private:
  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Deterministic stream splitting: child seed k of a master seed.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t k);

Mat gaussian_mat(Rng& rng, int rows, int cols);

}  // namespace grassmin
