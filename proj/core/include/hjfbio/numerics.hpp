#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace hjfbio {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Symmetric dense matrix. Every mutation writes both triangles, so
/// (i, j) and (j, i) always hold bit-identical values.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Index n) : data_(Matrix::Zero(n, n)) {}

  /// Builds from the upper triangle of `m`, mirroring it into the lower one.
  static SymMatrix from_upper(const Matrix& m);
  /// Builds from `m`, which must already be exactly symmetric.
  static SymMatrix from_symmetric(const Matrix& m);
  static SymMatrix identity(Index n);
  static SymMatrix diagonal(const Vector& d);

  Index size() const { return data_.rows(); }
  double operator()(Index i, Index j) const { return data_(i, j); }
  void set(Index i, Index j, double value) {
    data_(i, j) = value;
    data_(j, i) = value;
  }

  const Matrix& dense() const { return data_; }
  Vector operator*(const Vector& v) const { return data_ * v; }

  double frobenius_norm() const { return data_.norm(); }

  /// Q * this * Q^T, symmetrized from the upper triangle.
  SymMatrix conjugate(const Matrix& q) const;

 private:
  Matrix data_;
};

/// Returns true when every entry is finite.
inline bool all_finite(const Vector& v) { return v.allFinite(); }

/// Frobenius inner product <a, b> = trace(a^T b).
inline double frobenius_inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

/// Reshapes a column-major flat vector into a rows x cols matrix.
Matrix unflatten(const Vector& flat, Index rows, Index cols);
/// Flattens a matrix column-major.
Vector flatten(const Matrix& m);

}  // namespace hjfbio
