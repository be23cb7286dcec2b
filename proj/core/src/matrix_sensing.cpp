#include "hjfbio/matrix_sensing.hpp"

#include <algorithm>
#include <cmath>

#include "hjfbio/errors.hpp"
#include "hjfbio/rng.hpp"

namespace hjfbio {

Vector MatrixSensingProblem::upper_part(const Matrix& U) const {
  return flatten(U.leftCols(r() - 1));
}

Vector MatrixSensingProblem::lower_part(const Matrix& U) const { return U.col(r() - 1); }

Matrix MatrixSensingProblem::assemble(const Vector& x, const Vector& y) const {
  Matrix U(d(), r());
  U.leftCols(r() - 1) = unflatten(x, d(), r() - 1);
  U.col(r() - 1) = y;
  return U;
}

MatrixSensingProblem gen_matsense(const MatrixSensingParams& params) {
  const Index d = params.d;
  const Index r = params.r;
  const Index n = params.samples();
  if (d < 1) throw InvalidArgument("gen_matsense: requires d >= 1");
  if (r < 2) throw InvalidArgument("gen_matsense: requires r >= 2 (one column per level)");
  if (n < 2) throw InvalidArgument("gen_matsense: requires n >= 2");
  if (!(params.init_scale >= 0.0)) {
    throw InvalidArgument("gen_matsense: init_scale must be nonnegative");
  }

  Rng rng(params.seed);
  MatrixSensingProblem problem;
  problem.params = params;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  problem.U_star = rng.normal_matrix(d, r, 0.0, inv_sqrt_d);
  problem.H_star = problem.U_star * problem.U_star.transpose();
  problem.C.reserve(static_cast<std::size_t>(n));
  problem.o.resize(n);
  for (Index i = 0; i < n; ++i) {
    problem.C.push_back(rng.normal_matrix(d, d));
    problem.o(i) = frobenius_inner(problem.C.back(), problem.H_star);
  }

  const auto perm = rng.permutation(n);
  const auto n_train =
      std::clamp<Index>(static_cast<Index>(std::llround(0.4 * static_cast<double>(n))), 1, n - 1);
  problem.train.assign(perm.begin(), perm.begin() + n_train);
  problem.val.assign(perm.begin() + n_train, perm.end());
  std::sort(problem.train.begin(), problem.train.end());
  std::sort(problem.val.begin(), problem.val.end());

  problem.U0 = rng.normal_matrix(d, r, 0.0, params.init_scale * inv_sqrt_d);
  return problem;
}

double sensing_sample_loss(const Matrix& C, double o, const Matrix& U) {
  const double residual = frobenius_inner(C, U * U.transpose()) - o;
  return 0.5 * residual * residual;
}

Matrix sensing_sample_grad(const Matrix& C, double o, const Matrix& U) {
  const double residual = frobenius_inner(C, U * U.transpose()) - o;
  return residual * (C + C.transpose()) * U;
}

SensingMetrics sensing_metrics(const MatrixSensingProblem& problem, const Matrix& U) {
  if (U.rows() != problem.d() || U.cols() != problem.r()) {
    throw InvalidArgument("sensing_metrics: U has the wrong shape");
  }
  const Matrix UUt = U * U.transpose();
  const auto n = static_cast<Index>(problem.C.size());
  double sum_sq = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double residual =
        frobenius_inner(problem.C[static_cast<std::size_t>(i)], UUt) - problem.o(i);
    sum_sq += residual * residual;
  }
  SensingMetrics m;
  m.loss = sum_sq / (2.0 * static_cast<double>(n));
  m.distance = (UUt - problem.H_star).squaredNorm() / problem.H_star.squaredNorm();
  return m;
}

MatrixSensingOracle::MatrixSensingOracle(const MatrixSensingProblem& problem)
    : d_(problem.d()), r_(problem.r()) {
  auto build = [&](const std::vector<Index>& indices) {
    Split split;
    split.sensing.resize(static_cast<Index>(indices.size()), d_ * d_);
    split.labels.resize(static_cast<Index>(indices.size()));
    for (std::size_t k = 0; k < indices.size(); ++k) {
      const auto i = static_cast<std::size_t>(indices[k]);
      split.sensing.row(static_cast<Index>(k)) = flatten(problem.C[i]).transpose();
      split.labels(static_cast<Index>(k)) = problem.o(indices[k]);
    }
    return split;
  };
  train_ = build(problem.train);
  val_ = build(problem.val);
}

Matrix MatrixSensingOracle::factor(const Vector& x, const Vector& y) const {
  Matrix U(d_, r_);
  U.leftCols(r_ - 1) = unflatten(x, d_, r_ - 1);
  U.col(r_ - 1) = y;
  return U;
}

Vector MatrixSensingOracle::residuals(const Split& split, const Matrix& U) const {
  const Matrix UUt = U * U.transpose();
  return split.sensing * flatten(UUt) - split.labels;
}

double MatrixSensingOracle::loss(const Split& split, const Matrix& U) const {
  return 0.5 * residuals(split, U).squaredNorm() / static_cast<double>(split.labels.size());
}

Matrix MatrixSensingOracle::grad(const Split& split, const Matrix& U) const {
  const Vector res = residuals(split, U);
  // sum_i r_i C_i, then (M + M^T) U.
  const Matrix weighted =
      unflatten(split.sensing.transpose() * res, d_, d_) / static_cast<double>(res.size());
  return (weighted + weighted.transpose()) * U;
}

double MatrixSensingOracle::f(const Vector& x, const Vector& y) const {
  return loss(val_, factor(x, y));
}

double MatrixSensingOracle::g(const Vector& x, const Vector& y) const {
  return loss(train_, factor(x, y));
}

Vector MatrixSensingOracle::grad_x_f(const Vector& x, const Vector& y) const {
  return flatten(grad(val_, factor(x, y)).leftCols(r_ - 1));
}

Vector MatrixSensingOracle::grad_y_f(const Vector& x, const Vector& y) const {
  return grad(val_, factor(x, y)).col(r_ - 1);
}

Vector MatrixSensingOracle::grad_x_g(const Vector& x, const Vector& y) const {
  return flatten(grad(train_, factor(x, y)).leftCols(r_ - 1));
}

Vector MatrixSensingOracle::grad_y_g(const Vector& x, const Vector& y) const {
  return grad(train_, factor(x, y)).col(r_ - 1);
}

std::optional<SymMatrix> MatrixSensingOracle::hess_yy_g(const Vector& x, const Vector& y) const {
  const Matrix U = factor(x, y);
  const Vector res = residuals(train_, U);
  const auto m = static_cast<double>(res.size());
  Matrix h = Matrix::Zero(d_, d_);
  for (Index i = 0; i < res.size(); ++i) {
    const Matrix c = unflatten(train_.sensing.row(i).transpose(), d_, d_);
    const Matrix s = c + c.transpose();
    const Vector sy = s * y;
    h += sy * sy.transpose() + res(i) * s;
  }
  return SymMatrix::from_upper(h / m);
}

std::optional<Matrix> MatrixSensingOracle::hess_xy_g(const Vector& x, const Vector& y) const {
  const Matrix U = factor(x, y);
  const Matrix X = U.leftCols(r_ - 1);
  const Vector res = residuals(train_, U);
  const auto m = static_cast<double>(res.size());
  Matrix j = Matrix::Zero(d_ * (r_ - 1), d_);
  for (Index i = 0; i < res.size(); ++i) {
    const Matrix c = unflatten(train_.sensing.row(i).transpose(), d_, d_);
    const Matrix s = c + c.transpose();
    j += flatten(s * X) * (s * y).transpose();
  }
  // The residual term r_i S_i X does not depend on y.
  return Matrix(j / m);
}

}  // namespace hjfbio
