#pragma once

// Exact second-order quantities used to verify the Hessian/Jacobian-free
// solver: the clamped-spectrum Hessian surrogate, the auxiliary target v*,
// the exact hypergradient and the Lyapunov potential. These cost an
// eigendecomposition each and are never on the solver's core path.

#include "hjfbio/constants.hpp"
#include "hjfbio/numerics.hpp"
#include "hjfbio/problem.hpp"
#include "hjfbio/regularizer.hpp"
#include "hjfbio/sym_eigen.hpp"

namespace hjfbio {

enum class ClampMode {
  /// Signed eigenvalues are clamped into [mu, l_g]; negatives become mu.
  kSigned,
  /// Magnitudes are clamped into [mu, l_g] and the sign is kept. Only for
  /// sensitivity experiments: the result is indefinite when h is.
  kMagnitude,
};

struct ClampedSpectrum {
  SymMatrix source;
  double mu = 0.0;
  double l_g = 0.0;
  Vector eigvals_clamped;
  Matrix eigvecs;

  /// Q diag(clamped) Q^T.
  SymMatrix matrix() const;
  /// S v without forming S.
  Vector apply(const Vector& v) const;
  /// S^{-1} b through the stored eigenbasis.
  Vector solve(const Vector& b) const;
};

ClampedSpectrum clamp_spectrum(const SymMatrix& h, double mu, double l_g,
                               ClampMode mode = ClampMode::kSigned);

/// (S_[mu, l_g][hess_yy g(x, y)])^{-1} grad_y f(x, y).
Vector v_star(const BilevelOracle& oracle, const Vector& x, const Vector& y, double mu, double l_g);

/// grad_x f - hess_xy g (S_[mu, l_g][hess_yy g])^{-1} grad_y f at (x, y).
/// At y = y*(x) this is the true hypergradient grad F(x).
Vector exact_hypergrad(const BilevelOracle& oracle, const Vector& x, const Vector& y, double mu,
                       double l_g);

/// grad F(x), evaluated as exact_hypergrad at the closed-form y*(x).
Vector true_hypergrad(const BilevelOracle& oracle, const Vector& x, double mu, double l_g);

struct LyapunovTerms {
  double upper = 0.0;       // Phi(x) = F(x) + phi(x)
  double lower_gap = 0.0;   // g(x, y) - G(x)
  double v_residual = 0.0;  // |v - v*(x, y)|^2
  double total() const { return upper + lower_gap + v_residual; }
};

/// Terms of the potential Phi(x) + g(x, y) - G(x) + |v - v*|^2. With a zero
/// regularizer the upper term is F(x) alone.
LyapunovTerms lyapunov_terms(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                             const Vector& v, const Regularizer& reg, double mu, double l_g);

inline double lyapunov(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                       const Vector& v, const Regularizer& reg, double mu, double l_g) {
  return lyapunov_terms(oracle, x, y, v, reg, mu, l_g).total();
}

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds(double slack = 1e-9) const { return lhs <= rhs * (1.0 + slack); }
};

/// Both sides of |hat grad f(x, y) - grad F(x)|^2 <= (2 L_hat^2 / mu) (g(x, y) - G(x)).
/// Clamp bounds are constants.mu and constants.l_g.
BoundCheck hypergrad_error_bound_check(const BilevelOracle& oracle, const Vector& x,
                                       const Vector& y, const SmoothnessConstants& constants);

}  // namespace hjfbio
