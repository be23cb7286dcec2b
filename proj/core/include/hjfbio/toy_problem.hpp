#pragma once

#include "hjfbio/constants.hpp"
#include "hjfbio/problem.hpp"
#include "hjfbio/regularizer.hpp"
#include "hjfbio/solver.hpp"

namespace hjfbio {

/// Scalar nonconvex-PL example with closed forms everywhere:
///
///   f(x, y) = x^2 + y^2 + 3 x sin^2(y)
///   g(x, y) = x y^2 + x sin^2(y)
///   phi     = indicator of [1, 2]
///
/// For x > 0 the lower problem has the unique minimizer y*(x) = 0, so
/// G(x) = 0 and F(x) = x^2. hess_yy g = 2x(1 + cos 2y) vanishes at y = pi/2,
/// so g(x, .) is PL but not convex.
class ToyProblem final : public BilevelOracle {
 public:
  Index upper_dim() const override { return 1; }
  Index lower_dim() const override { return 1; }

  double f(const Vector& x, const Vector& y) const override;
  double g(const Vector& x, const Vector& y) const override;
  Vector grad_x_f(const Vector& x, const Vector& y) const override;
  Vector grad_y_f(const Vector& x, const Vector& y) const override;
  Vector grad_x_g(const Vector& x, const Vector& y) const override;
  Vector grad_y_g(const Vector& x, const Vector& y) const override;
  std::optional<SymMatrix> hess_yy_g(const Vector& x, const Vector& y) const override;
  std::optional<Matrix> hess_xy_g(const Vector& x, const Vector& y) const override;
  /// y*(x) = 0 for x > 0; no minimizer exists for x < 0.
  std::optional<Vector> lower_solution(const Vector& x) const override;
  std::optional<double> lower_value(const Vector& x) const override;

  /// Constants valid on x in [1, 2], |y| <= 1 (mu = 1 is the PL constant;
  /// it also lower-bounds hess_yy g at y* = 0, which is 4x).
  static SmoothnessConstants constants();
  static Regularizer regularizer() { return Regularizer::box(1, 1.0, 2.0); }
  /// (x, y, v) = (1.5, 0.3, 0).
  static SolverState initial_state();
};

}  // namespace hjfbio
