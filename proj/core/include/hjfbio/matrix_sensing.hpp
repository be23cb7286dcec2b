#pragma once

#include <cstdint>
#include <vector>

#include "hjfbio/numerics.hpp"
#include "hjfbio/problem.hpp"

namespace hjfbio {

struct MatrixSensingParams {
  Index d = 20;
  Index r = 3;
  Index n = 0;  // sample count; 0 selects 30 * d
  std::uint64_t seed = 0;
  /// The initial U has N(0, init_scale^2 / d) entries.
  double init_scale = 1e-2;

  Index samples() const { return n > 0 ? n : 30 * d; }
};

/// Low-rank matrix sensing split into a bilevel problem. With
/// l_i(U) = (<C_i, U U^T> - o_i)^2 / 2, the upper objective averages l_i over
/// the validation indices and the lower objective over the training indices.
/// x is the first r - 1 columns of U (flattened column-major), y the last.
///
/// Draw order from Rng(seed): U* (d x r, row-major, N(0, 1/d)), then C_1..C_n
/// (each d x d row-major, N(0, 1)), then a permutation of 0..n-1 whose first
/// round(0.4 n) entries form the training split, then the initial U.
struct MatrixSensingProblem {
  MatrixSensingParams params;
  std::vector<Matrix> C;
  Vector o;
  Matrix U_star;
  Matrix H_star;
  std::vector<Index> train;  // ascending
  std::vector<Index> val;    // ascending
  Matrix U0;

  Index d() const { return params.d; }
  Index r() const { return params.r; }
  /// x and y of a full factor U.
  Vector upper_part(const Matrix& U) const;
  Vector lower_part(const Matrix& U) const;
  Matrix assemble(const Vector& x, const Vector& y) const;
};

MatrixSensingProblem gen_matsense(const MatrixSensingParams& params);

struct SensingMetrics {
  double loss = 0.0;      // (1/2n) sum_i (<C_i, U U^T> - o_i)^2 over all samples
  double distance = 0.0;  // |U U^T - H*|_F^2 / |H*|_F^2
};

SensingMetrics sensing_metrics(const MatrixSensingProblem& problem, const Matrix& U);

/// Per-sample loss and its gradient (<C, UU^T> - o)(C + C^T) U.
double sensing_sample_loss(const Matrix& C, double o, const Matrix& U);
Matrix sensing_sample_grad(const Matrix& C, double o, const Matrix& U);

class MatrixSensingOracle final : public BilevelOracle {
 public:
  explicit MatrixSensingOracle(const MatrixSensingProblem& problem);

  Index upper_dim() const override { return d_ * (r_ - 1); }
  Index lower_dim() const override { return d_; }
  double f(const Vector& x, const Vector& y) const override;
  double g(const Vector& x, const Vector& y) const override;
  Vector grad_x_f(const Vector& x, const Vector& y) const override;
  Vector grad_y_f(const Vector& x, const Vector& y) const override;
  Vector grad_x_g(const Vector& x, const Vector& y) const override;
  Vector grad_y_g(const Vector& x, const Vector& y) const override;
  std::optional<SymMatrix> hess_yy_g(const Vector& x, const Vector& y) const override;
  std::optional<Matrix> hess_xy_g(const Vector& x, const Vector& y) const override;

 private:
  // Rows of `sensing` are the vectorized C_i of one split.
  struct Split {
    Matrix sensing;  // m x d^2
    Vector labels;
  };

  Matrix factor(const Vector& x, const Vector& y) const;
  Vector residuals(const Split& split, const Matrix& U) const;
  double loss(const Split& split, const Matrix& U) const;
  /// Gradient of the split loss with respect to the full U.
  Matrix grad(const Split& split, const Matrix& U) const;

  Index d_;
  Index r_;
  Split train_;
  Split val_;
};

}  // namespace hjfbio
