#include "hjfbio/pl_game.hpp"

#include <cmath>

#include "hjfbio/errors.hpp"
#include "hjfbio/rng.hpp"
#include "hjfbio/sym_eigen.hpp"

namespace hjfbio {

namespace {

struct Covariance {
  Matrix factor;  // samples are factor * z, z standard normal
};

Covariance low_rank_covariance(Rng& rng, Index d, Index l, double lo, double hi) {
  const Matrix u = random_orthonormal_columns(rng, d, l);
  Vector diag(l);
  for (Index i = 0; i < l; ++i) diag(i) = rng.uniform(lo, hi);
  return {u * diag.cwiseSqrt().asDiagonal()};
}

SymMatrix sample_second_moment(Rng& rng, const Matrix& factor, Index n, double weight) {
  Matrix samples(factor.rows(), n);
  for (Index i = 0; i < n; ++i) {
    samples.col(i) = factor * rng.normal_vector(factor.cols());
  }
  return SymMatrix::from_upper(weight / static_cast<double>(n) * samples * samples.transpose());
}

}  // namespace

PLGameProblem gen_plgame(const PLGameParams& params) {
  const Index d = params.d;
  const Index l = params.l;
  const Index n = params.samples();
  if (d < 2 || l < 1 || l >= d) throw InvalidArgument("gen_plgame: requires 1 <= l < d");
  if (n < 1) throw InvalidArgument("gen_plgame: requires n >= 1");
  if (!(params.mu > 0.0 && params.mu < params.L)) {
    throw InvalidArgument("gen_plgame: requires 0 < mu < L");
  }

  Rng rng(params.seed);
  const Covariance cov_p = low_rank_covariance(rng, d, l, params.mu, params.L);
  const Covariance cov_q = low_rank_covariance(rng, d, l, params.mu, params.L);
  // Sigma_R = 0.001 V V^T, so samples are sqrt(0.001) V z.
  const Matrix r1_factor = std::sqrt(0.001) * rng.normal_matrix(d, d);
  const Matrix r2_factor = std::sqrt(0.001) * rng.normal_matrix(d, d);

  PLGameProblem problem;
  problem.params = params;
  problem.P = sample_second_moment(rng, cov_p.factor, n, 1.0);
  problem.Q = sample_second_moment(rng, cov_q.factor, n, 1.0);
  problem.R1 = sample_second_moment(rng, r1_factor, n, 0.01);
  problem.R2 = sample_second_moment(rng, r2_factor, n, 0.01);
  problem.x0 = rng.normal_vector(d);
  problem.y0 = rng.normal_vector(d);
  return problem;
}

PLGameOracle::PLGameOracle(const PLGameProblem& problem, bool project_coupling)
    : p_(problem.P),
      q_(problem.Q),
      r1_(problem.R1.dense()),
      coupling_(problem.R2.dense()),
      projected_(project_coupling) {
  const EigenDecomposition eig = sym_eigen(q_);
  const Index p = q_.size();
  const double threshold = kRankThreshold * std::max(eig.eigenvalues.cwiseAbs().maxCoeff(), 1.0);
  Vector inverse = Vector::Zero(p);
  Vector range = Vector::Zero(p);
  q_min_nonzero_ = 0.0;
  for (Index i = 0; i < p; ++i) {
    const double e = eig.eigenvalues(i);
    if (e > threshold) {
      inverse(i) = 1.0 / e;
      range(i) = 1.0;
      if (q_min_nonzero_ == 0.0) q_min_nonzero_ = e;
    }
  }
  const Matrix& vecs = eig.eigenvectors;
  q_pinv_ = vecs * inverse.asDiagonal() * vecs.transpose();
  if (projected_) {
    const Matrix projector = vecs * range.asDiagonal() * vecs.transpose();
    coupling_ = coupling_ * projector;
  }
  Eigen::JacobiSVD<Matrix> svd(coupling_);
  l_g_ = eig.eigenvalues.cwiseAbs().maxCoeff() + svd.singularValues()(0);
}

double PLGameOracle::f(const Vector& x, const Vector& y) const {
  return 0.5 * x.dot(p_ * x) + x.dot(r1_ * y);
}

double PLGameOracle::g(const Vector& x, const Vector& y) const {
  return 0.5 * y.dot(q_ * y) + x.dot(coupling_ * y);
}

Vector PLGameOracle::grad_x_f(const Vector& x, const Vector& y) const { return p_ * x + r1_ * y; }

Vector PLGameOracle::grad_y_f(const Vector& x, const Vector&) const { return r1_.transpose() * x; }

Vector PLGameOracle::grad_x_g(const Vector&, const Vector& y) const { return coupling_ * y; }

Vector PLGameOracle::grad_y_g(const Vector& x, const Vector& y) const {
  return q_ * y + coupling_.transpose() * x;
}

std::optional<SymMatrix> PLGameOracle::hess_yy_g(const Vector&, const Vector&) const { return q_; }

std::optional<Matrix> PLGameOracle::hess_xy_g(const Vector&, const Vector&) const {
  return coupling_;
}

std::optional<Vector> PLGameOracle::lower_solution(const Vector& x) const {
  if (!projected_) return std::nullopt;
  return Vector(-q_pinv_ * (coupling_.transpose() * x));
}

std::optional<double> PLGameOracle::lower_value(const Vector& x) const {
  if (!projected_) return std::nullopt;
  const Vector b = coupling_.transpose() * x;
  return -0.5 * b.dot(q_pinv_ * b);
}

}  // namespace hjfbio
