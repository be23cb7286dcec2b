#include "hjfbio/toy_problem.hpp"

#include <cmath>

namespace hjfbio {

namespace {

Vector scalar(double value) { return Vector::Constant(1, value); }

double sin_sq(double y) {
  const double s = std::sin(y);
  return s * s;
}

}  // namespace

double ToyProblem::f(const Vector& x, const Vector& y) const {
  return x(0) * x(0) + y(0) * y(0) + 3.0 * x(0) * sin_sq(y(0));
}

double ToyProblem::g(const Vector& x, const Vector& y) const {
  return x(0) * (y(0) * y(0) + sin_sq(y(0)));
}

Vector ToyProblem::grad_x_f(const Vector& x, const Vector& y) const {
  return scalar(2.0 * x(0) + 3.0 * sin_sq(y(0)));
}

Vector ToyProblem::grad_y_f(const Vector& x, const Vector& y) const {
  return scalar(2.0 * y(0) + 3.0 * x(0) * std::sin(2.0 * y(0)));
}

Vector ToyProblem::grad_x_g(const Vector&, const Vector& y) const {
  return scalar(y(0) * y(0) + sin_sq(y(0)));
}

Vector ToyProblem::grad_y_g(const Vector& x, const Vector& y) const {
  return scalar(2.0 * x(0) * y(0) + x(0) * std::sin(2.0 * y(0)));
}

std::optional<SymMatrix> ToyProblem::hess_yy_g(const Vector& x, const Vector& y) const {
  return SymMatrix::diagonal(scalar(2.0 * x(0) + 2.0 * x(0) * std::cos(2.0 * y(0))));
}

std::optional<Matrix> ToyProblem::hess_xy_g(const Vector&, const Vector& y) const {
  return Matrix::Constant(1, 1, 2.0 * y(0) + std::sin(2.0 * y(0)));
}

std::optional<Vector> ToyProblem::lower_solution(const Vector& x) const {
  if (!(x(0) > 0.0)) return std::nullopt;
  return scalar(0.0);
}

std::optional<double> ToyProblem::lower_value(const Vector& x) const {
  if (!(x(0) > 0.0)) return std::nullopt;
  return 0.0;
}

SmoothnessConstants ToyProblem::constants() {
  // Bounds over x in [1, 2], |y| <= 1:
  //   |grad_y f| = |2y + 3x sin 2y|         <= 2 + 6      = 8
  //   |grad_x f| = |2x + 3 sin^2 y|         <= 4 + 3      = 7
  //   |grad_y g| = |2xy + x sin 2y|         <= 4 + 2      = 6
  //   |g_xy|     = |2y + sin 2y|            <= 3
  //   hess f     = [[2, 3 sin 2y], [3 sin 2y, 2 + 6x cos 2y]], |.|_F <= sqrt(218) < 15
  //   hess g     = [[0, g_xy], [g_xy, 2x(1 + cos 2y)]],       |.|_F <= sqrt(82)  < 10
  //   |d g_xy|   = |(0, 2 + 2 cos 2y)|      <= 4
  //   |d g_yy|   = |(2(1 + cos 2y), -4x sin 2y)| <= sqrt(16 + 64) < 9
  SmoothnessConstants c;
  c.mu = 1.0;
  c.l_f = 15.0;
  c.l_g = 10.0;
  c.c_fy = 8.0;
  c.c_fx = 7.0;
  c.c_gxy = 3.0;
  c.c_gy = 6.0;
  c.l_gxy = 4.0;
  c.l_gyy = 9.0;
  return c;
}

SolverState ToyProblem::initial_state() {
  SolverState s;
  s.x = scalar(1.5);
  s.y = scalar(0.3);
  s.v = scalar(0.0);
  return s;
}

}  // namespace hjfbio
