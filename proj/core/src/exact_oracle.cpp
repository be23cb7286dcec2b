#include "hjfbio/exact_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "hjfbio/errors.hpp"

namespace hjfbio {

SymMatrix ClampedSpectrum::matrix() const {
  return SymMatrix::from_upper(eigvecs * eigvals_clamped.asDiagonal() * eigvecs.transpose());
}

Vector ClampedSpectrum::apply(const Vector& v) const {
  return eigvecs * eigvals_clamped.cwiseProduct(eigvecs.transpose() * v);
}

Vector ClampedSpectrum::solve(const Vector& b) const {
  return eigvecs * (eigvecs.transpose() * b).cwiseQuotient(eigvals_clamped);
}

ClampedSpectrum clamp_spectrum(const SymMatrix& h, double mu, double l_g, ClampMode mode) {
  if (!(mu > 0.0 && mu <= l_g)) {
    throw InvalidArgument("clamp_spectrum: requires 0 < mu <= l_g");
  }
  const EigenDecomposition eig = sym_eigen(h);
  ClampedSpectrum out;
  out.source = h;
  out.mu = mu;
  out.l_g = l_g;
  out.eigvecs = eig.eigenvectors;
  out.eigvals_clamped.resize(eig.eigenvalues.size());
  for (Index i = 0; i < eig.eigenvalues.size(); ++i) {
    const double e = eig.eigenvalues(i);
    if (mode == ClampMode::kSigned) {
      out.eigvals_clamped(i) = std::clamp(e, mu, l_g);
    } else {
      out.eigvals_clamped(i) = std::copysign(std::clamp(std::abs(e), mu, l_g), e);
    }
  }
  return out;
}

namespace {

SymMatrix require_hess_yy(const BilevelOracle& oracle, const Vector& x, const Vector& y) {
  auto h = oracle.hess_yy_g(x, y);
  if (!h) throw Unsupported("oracle does not provide hess_yy g");
  return std::move(*h);
}

Matrix require_hess_xy(const BilevelOracle& oracle, const Vector& x, const Vector& y) {
  auto j = oracle.hess_xy_g(x, y);
  if (!j) throw Unsupported("oracle does not provide hess_xy g");
  return std::move(*j);
}

Vector require_lower_solution(const BilevelOracle& oracle, const Vector& x) {
  auto y = oracle.lower_solution(x);
  if (!y) throw Unsupported("oracle does not provide a closed-form lower solution");
  return std::move(*y);
}

double require_lower_value(const BilevelOracle& oracle, const Vector& x) {
  auto value = oracle.lower_value(x);
  if (!value) throw Unsupported("oracle does not provide a closed-form lower value");
  return *value;
}

}  // namespace

Vector v_star(const BilevelOracle& oracle, const Vector& x, const Vector& y, double mu,
              double l_g) {
  const ClampedSpectrum s = clamp_spectrum(require_hess_yy(oracle, x, y), mu, l_g);
  return s.solve(oracle.grad_y_f(x, y));
}

Vector exact_hypergrad(const BilevelOracle& oracle, const Vector& x, const Vector& y, double mu,
                       double l_g) {
  const Matrix jac = require_hess_xy(oracle, x, y);
  return oracle.grad_x_f(x, y) - jac * v_star(oracle, x, y, mu, l_g);
}

Vector true_hypergrad(const BilevelOracle& oracle, const Vector& x, double mu, double l_g) {
  return exact_hypergrad(oracle, x, require_lower_solution(oracle, x), mu, l_g);
}

LyapunovTerms lyapunov_terms(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                             const Vector& v, const Regularizer& reg, double mu, double l_g) {
  const Vector y_star = require_lower_solution(oracle, x);
  LyapunovTerms terms;
  terms.upper = oracle.f(x, y_star) + reg.value(x);
  terms.lower_gap = oracle.g(x, y) - require_lower_value(oracle, x);
  terms.v_residual = (v - v_star(oracle, x, y, mu, l_g)).squaredNorm();
  return terms;
}

BoundCheck hypergrad_error_bound_check(const BilevelOracle& oracle, const Vector& x,
                                       const Vector& y, const SmoothnessConstants& constants) {
  constants.validate();
  const double mu = constants.mu;
  const double l_g = constants.l_g;
  const Vector estimate = exact_hypergrad(oracle, x, y, mu, l_g);
  const Vector truth = true_hypergrad(oracle, x, mu, l_g);
  const double gap = oracle.g(x, y) - require_lower_value(oracle, x);
  return {(estimate - truth).squaredNorm(), 2.0 * constants.l_hat_sq() / mu * gap};
}

}  // namespace hjfbio
