#pragma once

#include "hjfbio/problem.hpp"
#include "hjfbio/rng.hpp"

namespace hjfbio {

/// Dense quadratic bilevel problem
///
///   f(x, y) = x^T P x / 2 + x^T R y + y^T S y / 2
///   g(x, y) = y^T Q y / 2 + x^T K y
///
/// Every derivative is exact, so finite-difference estimators reproduce the
/// Hessian- and Jacobian-vector products up to rounding. When Q is positive
/// definite the lower solution is -Q^{-1} K^T x.
class QuadraticOracle final : public BilevelOracle {
 public:
  QuadraticOracle(SymMatrix P, Matrix R, SymMatrix S, SymMatrix Q, Matrix K);

  /// Random instance: P, S, Q symmetric with N(0, 1) upper triangles, R and
  /// K standard normal. random_spd_lower instead draws Q with eigenvalues
  /// uniform in [lo, hi] on a random orthonormal basis.
  static QuadraticOracle random(Rng& rng, Index d, Index p);
  static QuadraticOracle random_spd_lower(Rng& rng, Index d, Index p, double lo, double hi);

  Index upper_dim() const override { return P_.size(); }
  Index lower_dim() const override { return Q_.size(); }
  double f(const Vector& x, const Vector& y) const override;
  double g(const Vector& x, const Vector& y) const override;
  Vector grad_x_f(const Vector& x, const Vector& y) const override;
  Vector grad_y_f(const Vector& x, const Vector& y) const override;
  Vector grad_x_g(const Vector& x, const Vector& y) const override;
  Vector grad_y_g(const Vector& x, const Vector& y) const override;
  std::optional<SymMatrix> hess_yy_g(const Vector& x, const Vector& y) const override;
  std::optional<Matrix> hess_xy_g(const Vector& x, const Vector& y) const override;
  std::optional<Vector> lower_solution(const Vector& x) const override;
  std::optional<double> lower_value(const Vector& x) const override;

  const SymMatrix& P() const { return P_; }
  const Matrix& R() const { return R_; }
  const SymMatrix& S() const { return S_; }
  const SymMatrix& Q() const { return Q_; }
  const Matrix& K() const { return K_; }

 private:
  SymMatrix P_;
  Matrix R_;
  SymMatrix S_;
  SymMatrix Q_;
  Matrix K_;
  bool q_positive_definite_ = false;
  Eigen::LLT<Matrix> q_chol_;
};

}  // namespace hjfbio
