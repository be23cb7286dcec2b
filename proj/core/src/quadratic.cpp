#include "hjfbio/quadratic.hpp"

#include "hjfbio/errors.hpp"

namespace hjfbio {

QuadraticOracle::QuadraticOracle(SymMatrix P, Matrix R, SymMatrix S, SymMatrix Q, Matrix K)
    : P_(std::move(P)), R_(std::move(R)), S_(std::move(S)), Q_(std::move(Q)), K_(std::move(K)) {
  const Index d = P_.size();
  const Index p = Q_.size();
  if (R_.rows() != d || R_.cols() != p || S_.size() != p || K_.rows() != d || K_.cols() != p) {
    throw InvalidArgument("QuadraticOracle: inconsistent block shapes");
  }
  q_chol_.compute(Q_.dense());
  q_positive_definite_ = q_chol_.info() == Eigen::Success;
}

namespace {

SymMatrix random_symmetric(Rng& rng, Index n) {
  return SymMatrix::from_upper(rng.normal_matrix(n, n));
}

}  // namespace

QuadraticOracle QuadraticOracle::random(Rng& rng, Index d, Index p) {
  SymMatrix P = random_symmetric(rng, d);
  Matrix R = rng.normal_matrix(d, p);
  SymMatrix S = random_symmetric(rng, p);
  SymMatrix Q = random_symmetric(rng, p);
  Matrix K = rng.normal_matrix(d, p);
  return QuadraticOracle(std::move(P), std::move(R), std::move(S), std::move(Q), std::move(K));
}

QuadraticOracle QuadraticOracle::random_spd_lower(Rng& rng, Index d, Index p, double lo,
                                                  double hi) {
  SymMatrix P = random_symmetric(rng, d);
  Matrix R = rng.normal_matrix(d, p);
  SymMatrix S = random_symmetric(rng, p);
  const Matrix basis = random_orthonormal_columns(rng, p, p);
  Vector spectrum(p);
  for (Index i = 0; i < p; ++i) spectrum(i) = rng.uniform(lo, hi);
  SymMatrix Q = SymMatrix::diagonal(spectrum).conjugate(basis);
  Matrix K = rng.normal_matrix(d, p);
  return QuadraticOracle(std::move(P), std::move(R), std::move(S), std::move(Q), std::move(K));
}

double QuadraticOracle::f(const Vector& x, const Vector& y) const {
  return 0.5 * x.dot(P_ * x) + x.dot(R_ * y) + 0.5 * y.dot(S_ * y);
}

double QuadraticOracle::g(const Vector& x, const Vector& y) const {
  return 0.5 * y.dot(Q_ * y) + x.dot(K_ * y);
}

Vector QuadraticOracle::grad_x_f(const Vector& x, const Vector& y) const { return P_ * x + R_ * y; }

Vector QuadraticOracle::grad_y_f(const Vector& x, const Vector& y) const {
  return R_.transpose() * x + S_ * y;
}

Vector QuadraticOracle::grad_x_g(const Vector&, const Vector& y) const { return K_ * y; }

Vector QuadraticOracle::grad_y_g(const Vector& x, const Vector& y) const {
  return Q_ * y + K_.transpose() * x;
}

std::optional<SymMatrix> QuadraticOracle::hess_yy_g(const Vector&, const Vector&) const {
  return Q_;
}

std::optional<Matrix> QuadraticOracle::hess_xy_g(const Vector&, const Vector&) const { return K_; }

std::optional<Vector> QuadraticOracle::lower_solution(const Vector& x) const {
  if (!q_positive_definite_) return std::nullopt;
  return Vector(-q_chol_.solve(K_.transpose() * x));
}

std::optional<double> QuadraticOracle::lower_value(const Vector& x) const {
  const auto y = lower_solution(x);
  if (!y) return std::nullopt;
  return g(x, *y);
}

}  // namespace hjfbio
