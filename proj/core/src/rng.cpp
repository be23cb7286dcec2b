#include "hjfbio/rng.hpp"

#include <cmath>
#include <numbers>

#include "hjfbio/errors.hpp"

namespace hjfbio {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("Rng::below: empty range");
  auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  return k < n ? k : n - 1;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Vector Rng::normal_vector(Index n, double mean, double stddev) {
  Vector out(n);
  for (Index i = 0; i < n; ++i) out(i) = mean + stddev * normal();
  return out;
}

Matrix Rng::normal_matrix(Index rows, Index cols, double mean, double stddev) {
  // Row-major draw order so the stream layout matches the snapshot layout.
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) out(i, j) = mean + stddev * normal();
  }
  return out;
}

std::vector<Index> Rng::permutation(Index n) {
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(below(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

Vector normal_sample(Rng& rng, Index n, double mean, double stddev) {
  if (!(stddev >= 0.0)) {
    throw InvalidArgument("normal_sample: stddev must be nonnegative");
  }
  return rng.normal_vector(n, mean, stddev);
}

Matrix random_orthonormal_columns(Rng& rng, Index rows, Index cols) {
  if (cols > rows || cols < 0) {
    throw InvalidArgument("random_orthonormal_columns: need 0 <= cols <= rows");
  }
  const Matrix gaussian = rng.normal_matrix(rows, cols);
  Eigen::HouseholderQR<Matrix> qr(gaussian);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  // Fix the sign ambiguity of QR so the result depends only on the stream.
  const Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Index k = 0; k < cols; ++k) {
    if (r(k, k) < 0.0) q.col(k) = -q.col(k);
  }
  return q;
}

}  // namespace hjfbio
