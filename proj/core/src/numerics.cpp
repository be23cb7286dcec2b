#include "hjfbio/numerics.hpp"

#include "hjfbio/errors.hpp"

namespace hjfbio {

SymMatrix SymMatrix::from_upper(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument("SymMatrix::from_upper: matrix is not square");
  }
  SymMatrix out(m.rows());
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i <= j; ++i) {
      out.set(i, j, m(i, j));
    }
  }
  return out;
}

SymMatrix SymMatrix::from_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument("SymMatrix::from_symmetric: matrix is not square");
  }
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < j; ++i) {
      if (m(i, j) != m(j, i)) {
        throw InvalidArgument("SymMatrix::from_symmetric: matrix is not symmetric");
      }
    }
  }
  SymMatrix out;
  out.data_ = m;
  return out;
}

SymMatrix SymMatrix::identity(Index n) {
  SymMatrix out;
  out.data_ = Matrix::Identity(n, n);
  return out;
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
  SymMatrix out(d.size());
  for (Index i = 0; i < d.size(); ++i) out.data_(i, i) = d(i);
  return out;
}

SymMatrix SymMatrix::conjugate(const Matrix& q) const {
  if (q.cols() != size()) {
    throw InvalidArgument("SymMatrix::conjugate: dimension mismatch");
  }
  return from_upper(q * data_ * q.transpose());
}

Matrix unflatten(const Vector& flat, Index rows, Index cols) {
  if (flat.size() != rows * cols) {
    throw InvalidArgument("unflatten: size mismatch");
  }
  return Eigen::Map<const Matrix>(flat.data(), rows, cols);
}

Vector flatten(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

}  // namespace hjfbio
