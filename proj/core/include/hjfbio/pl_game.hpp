#pragma once

#include <cstdint>

#include "hjfbio/numerics.hpp"
#include "hjfbio/problem.hpp"

namespace hjfbio {

struct PLGameParams {
  Index d = 20;
  Index l = 10;     // rank of the covariances of P and Q, l < d
  Index n = 0;      // sample count; 0 selects 50 * d
  double mu = 0.1;  // lower end of the D1/D2 diagonal range
  double L = 1.0;   // upper end of the D1/D2 diagonal range
  std::uint64_t seed = 0;
  /// Replace the coupling R2 by R2 Pi, Pi the projector onto range(Q), so
  /// that y*(x) = -Q^+ R2 x exists and the exact columns are available.
  bool project_coupling = false;

  Index samples() const { return n > 0 ? n : 50 * d; }
};

/// Quadratic bilevel game
///
///   f(x, y) = x^T P x / 2 + x^T R1 y
///   g(x, y) = y^T Q y / 2 + x^T R2 y
///
/// with P = (1/n) sum p_i p_i^T, Q = (1/n) sum q_i q_i^T,
/// R_k = (1/n) sum 0.01 r_i^k (r_i^k)^T and
///   p_i ~ N(0, U1 D1 U1^T),  q_i ~ N(0, U2 D2 U2^T),  r_i^k ~ N(0, 0.001 V_k V_k^T),
/// U_k in R^{d x l} column orthonormal, D_k diagonal uniform in [mu, L],
/// V_k standard normal d x d. P and Q are singular by construction.
///
/// Draw order from Rng(seed): U1, D1, U2, D2, V1, V2, then all p_i, all q_i,
/// all r_i^1, all r_i^2, then the initial x (d normals) and y (d normals).
struct PLGameProblem {
  PLGameParams params;
  SymMatrix P, Q, R1, R2;
  Vector x0, y0;
};

PLGameProblem gen_plgame(const PLGameParams& params);

class PLGameOracle final : public BilevelOracle {
 public:
  PLGameOracle(const PLGameProblem& problem, bool project_coupling);
  explicit PLGameOracle(const PLGameProblem& problem)
      : PLGameOracle(problem, problem.params.project_coupling) {}

  Index upper_dim() const override { return p_.size(); }
  Index lower_dim() const override { return q_.size(); }
  double f(const Vector& x, const Vector& y) const override;
  double g(const Vector& x, const Vector& y) const override;
  Vector grad_x_f(const Vector& x, const Vector& y) const override;
  Vector grad_y_f(const Vector& x, const Vector& y) const override;
  Vector grad_x_g(const Vector& x, const Vector& y) const override;
  Vector grad_y_g(const Vector& x, const Vector& y) const override;
  std::optional<SymMatrix> hess_yy_g(const Vector& x, const Vector& y) const override;
  std::optional<Matrix> hess_xy_g(const Vector& x, const Vector& y) const override;
  /// Minimum-norm minimizer -Q^+ B^T x; only with the projected coupling.
  std::optional<Vector> lower_solution(const Vector& x) const override;
  std::optional<double> lower_value(const Vector& x) const override;

  bool projected() const { return projected_; }
  /// Effective coupling matrix B in g = y^T Q y / 2 + x^T B y.
  const Matrix& coupling() const { return coupling_; }
  /// Smallest eigenvalue of Q above the rank threshold.
  double min_nonzero_q_eigenvalue() const { return q_min_nonzero_; }
  /// Spectral norm bound |Q| + |B| on the Hessian of g.
  double lower_smoothness() const { return l_g_; }

 private:
  SymMatrix p_, q_;
  Matrix r1_;
  Matrix coupling_;
  Matrix q_pinv_;
  bool projected_;
  double q_min_nonzero_ = 0.0;
  double l_g_ = 0.0;
};

/// Eigenvalues at or below this fraction of the largest count as zero when
/// forming range(Q) and Q^+.
inline constexpr double kRankThreshold = 1e-10;

}  // namespace hjfbio
