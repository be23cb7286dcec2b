#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hjfbio/numerics.hpp"

namespace hjfbio {

/// Seeded pseudo-random stream with a pinned algorithm:
///
///   bits     std::mt19937_64 seeded with `seed` (output fixed by the C++
///            standard, so identical on every conforming platform)
///   uniform  (bits >> 11) * 2^-53, in [0, 1)
///   normal   Box-Muller on (1 - u1, u2); both outputs of a pair are used,
///            cosine branch first
///   shuffle  Fisher-Yates from the back, j = floor(uniform * (i + 1))
///
/// Single owner; never share between threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();

  Vector normal_vector(Index n, double mean = 0.0, double stddev = 1.0);
  Matrix normal_matrix(Index rows, Index cols, double mean = 0.0, double stddev = 1.0);

  /// A uniformly random permutation of 0..n-1.
  std::vector<Index> permutation(Index n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// n draws from N(mean, stddev^2). stddev == 0 yields the constant vector.
Vector normal_sample(Rng& rng, Index n, double mean, double stddev);

/// A rows x cols matrix with orthonormal columns (cols <= rows), obtained
/// from the thin QR factor of a standard normal matrix.
Matrix random_orthonormal_columns(Rng& rng, Index rows, Index cols);

}  // namespace hjfbio
