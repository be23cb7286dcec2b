#include "hjfbio/sym_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "hjfbio/errors.hpp"

namespace hjfbio {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < j; ++i) sum += 2.0 * a(i, j) * a(i, j);
  }
  return std::sqrt(sum);
}

// Applies the rotation zeroing a(p, q) to a (both sides) and v (right side).
void rotate(Matrix& a, Matrix& v, Index p, Index q, bool allow_drop) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  // Past the first sweeps, entries below the rounding level of both
  // diagonal neighbours are dropped instead of rotated.
  const double g = 100.0 * std::abs(apq);
  if (allow_drop && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
      std::abs(a(q, q)) + g == std::abs(a(q, q))) {
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    return;
  }
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const Index n = a.rows();

  for (Index k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Index k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (Index k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

SymMatrix EigenDecomposition::reconstruct(const Vector& values) const {
  return SymMatrix::from_upper(eigenvectors * values.asDiagonal() * eigenvectors.transpose());
}

EigenDecomposition sym_eigen(const SymMatrix& m, const JacobiOptions& options) {
  const Index n = m.size();
  if (n > options.max_size) {
    throw InvalidArgument("sym_eigen: size " + std::to_string(n) + " exceeds the cap of " +
                          std::to_string(options.max_size));
  }
  Matrix a = m.dense();
  Matrix v = Matrix::Identity(n, n);
  const double scale = a.norm();
  const double tol = std::numeric_limits<double>::epsilon() * scale;

  int sweep = 0;
  double off = off_diagonal_norm(a);
  while (off > tol) {
    if (sweep == options.max_sweeps) {
      throw ConvergenceError("sym_eigen: no convergence after " + std::to_string(sweep) +
                                 " sweeps, off-diagonal norm " + std::to_string(off),
                             off);
    }
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) rotate(a, v, p, q, sweep > 3);
    }
    ++sweep;
    off = off_diagonal_norm(a);
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return a(i, i) < a(j, j); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = a(src, src);
    out.eigenvectors.col(k) = v.col(src);
  }
  return out;
}

}  // namespace hjfbio
