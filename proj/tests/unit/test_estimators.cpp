#include <gtest/gtest.h>

#include <cmath>

#include "hjfbio/errors.hpp"
#include "hjfbio/estimators.hpp"
#include "hjfbio/exact_oracle.hpp"
#include "hjfbio/pl_game.hpp"
#include "hjfbio/quadratic.hpp"
#include "hjfbio/toy_problem.hpp"
#include "testing.hpp"

namespace hjfbio {
namespace {

using testing::for_all;
using testing::rel_err;
using testing::scalar;

/// g(x, y) = y^T A y / 2 with no upper dependence, f = 0.
QuadraticOracle pure_lower_quadratic(const SymMatrix& a, Index d) {
  const Index p = a.size();
  return QuadraticOracle(SymMatrix(d), Matrix::Zero(d, p), SymMatrix(p), a, Matrix::Zero(d, p));
}

/// g(x, y) = x^T B y, f = 0.
QuadraticOracle bilinear(const Matrix& b) {
  return QuadraticOracle(SymMatrix(b.rows()), Matrix::Zero(b.rows(), b.cols()), SymMatrix(b.cols()),
                         SymMatrix(b.cols()), b);
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

TEST(FdConfig, Validation) {
  EXPECT_THROW(FdConfig{0.0}.validate(), InvalidArgument);
  EXPECT_THROW(FdConfig{-1e-5}.validate(), InvalidArgument);
  EXPECT_NO_THROW(FdConfig{1e-5}.validate());
  EXPECT_FALSE(FdConfig{1e-5}.warning().has_value());
  EXPECT_TRUE(FdConfig{1e-10}.warning().has_value());
}

TEST(FdHvp, QuadraticSeed1MatchesProduct) {
  Rng rng(1);
  const SymMatrix a = testing::random_symmetric(rng, 5);
  const QuadraticOracle q = pure_lower_quadratic(a, 3);
  const Vector x = rng.normal_vector(3);
  const Vector y = rng.normal_vector(5);
  const Vector v = rng.normal_vector(5);
  for (double delta : {1e-3, 1e-5}) {
    EXPECT_LE(rel_err(fd_hvp(q, x, y, v, FdConfig{delta}), a * v), 1e-8) << delta;
  }
}

TEST(FdHvp, ZeroDirectionGivesZeroAndStillCallsOracle) {
  const ToyProblem toy;
  CountingOracle counter(toy);
  const Vector got = fd_hvp(counter, scalar(1.5), scalar(0.3), scalar(0.0), FdConfig{});
  EXPECT_EQ(got, scalar(0.0));
  EXPECT_EQ(counter.gradient_calls(), 2u);
}

TEST(FdHvp, ToyMatchesAnalyticHessian) {
  const double x = 1.5;
  const double y = 0.3;
  const double analytic = 2 * x + 2 * x * std::cos(2 * y);
  const Vector got = fd_hvp(ToyProblem(), scalar(x), scalar(y), scalar(1.0), FdConfig{1e-5});
  EXPECT_NEAR(got(0), analytic, 5e-9);
}

TEST(FdHvp, RejectsMismatchedDirection) {
  EXPECT_THROW(fd_hvp(ToyProblem(), scalar(1.5), scalar(0.3), Vector::Zero(2), FdConfig{}),
               InvalidArgument);
}

TEST(FdJvp, BilinearMatchesProduct) {
  Rng rng(2);
  const Matrix b = rng.normal_matrix(4, 6);
  const QuadraticOracle q = bilinear(b);
  const Vector v = rng.normal_vector(6);
  const Vector got = fd_jvp(q, rng.normal_vector(4), rng.normal_vector(6), v, FdConfig{});
  EXPECT_LE((got - b * v).norm(), 1e-10 * (1.0 + (b * v).norm()));
}

TEST(FdJvp, ZeroDirectionGivesZero) {
  Rng rng(3);
  const QuadraticOracle q = bilinear(rng.normal_matrix(3, 2));
  EXPECT_EQ(fd_jvp(q, rng.normal_vector(3), rng.normal_vector(2), Vector::Zero(2), FdConfig{}),
            Vector::Zero(3));
}

TEST(FdJvp, ToyMatchesAnalyticCrossDerivative) {
  const double y = 0.3;
  const Vector got = fd_jvp(ToyProblem(), scalar(1.5), scalar(y), scalar(1.0), FdConfig{1e-5});
  EXPECT_NEAR(got(0), 2 * y + std::sin(2 * y), 5e-9);
}

TEST(ProjectBall, Examples) {
  EXPECT_EQ(project_ball(vec2(0.3, 0.4), 1.0), vec2(0.3, 0.4));
  const Vector p = project_ball(vec2(3.0, 4.0), 2.5);
  EXPECT_NEAR(p(0), 1.5, 1e-15);
  EXPECT_NEAR(p(1), 2.0, 1e-15);
  EXPECT_EQ(project_ball(Vector::Zero(2), 1.0), Vector::Zero(2));
  EXPECT_THROW(project_ball(vec2(1, 1), 0.0), InvalidArgument);
}

TEST(CapNorm, Examples) {
  EXPECT_EQ(cap_norm(vec2(0.0, 3.0), 4.0), vec2(0.0, 3.0));
  EXPECT_EQ(cap_norm(vec2(0.0, 10.0), 4.0), vec2(0.0, 4.0));
}

TEST(ProjectionProperty, NormBoundIdempotentNonexpansive) {
  for_all(31, 300, [](Rng& rng) {
    const Index n = 1 + static_cast<Index>(rng.below(8));
    const double r = rng.uniform(0.1, 3.0);
    const Vector a = rng.normal_vector(n, 0.0, 2.0);
    const Vector b = rng.normal_vector(n, 0.0, 2.0);
    const Vector pa = project_ball(a, r);
    EXPECT_LE(pa.norm(), r + 1e-12);
    EXPECT_LE((project_ball(pa, r) - pa).norm(), 1e-15 * r);
    EXPECT_LE((pa - project_ball(b, r)).norm(), (a - b).norm() * (1 + 1e-15));
    EXPECT_EQ(cap_norm(a, r), pa);
  });
}

TEST(FdHvpProperty, Antisymmetric) {
  for_all(32, 100, [](Rng& rng) {
    const Vector x = scalar(rng.uniform(1.0, 2.0));
    const Vector y = scalar(rng.uniform(-1.0, 1.0));
    const Vector v = scalar(rng.uniform(-3.0, 3.0));
    const FdConfig cfg{std::pow(10.0, -rng.uniform(2.0, 7.0))};
    const ToyProblem toy;
    EXPECT_LE((fd_hvp(toy, x, y, -v, cfg) + fd_hvp(toy, x, y, v, cfg)).norm(),
              1e-14 * fd_hvp(toy, x, y, v, cfg).norm());
  });
}

TEST(FdHvpProperty, DeltaIndependentOnQuadratics) {
  for_all(33, 30, [](Rng& rng) {
    const Index p = 1 + static_cast<Index>(rng.below(10));
    const QuadraticOracle q = QuadraticOracle::random(rng, 3, p);
    const Vector x = rng.normal_vector(3);
    const Vector y = rng.normal_vector(p);
    const Vector v = rng.normal_vector(p);
    const Vector reference = fd_hvp(q, x, y, v, FdConfig{1e-3});
    for (double delta : {1e-4, 1e-5}) {
      EXPECT_LE(rel_err(fd_hvp(q, x, y, v, FdConfig{delta}), reference), 1e-8);
    }
  });
}

TEST(FdHvpProperty, SecondOrderAccurateOnToy) {
  for_all(34, 20, [](Rng& rng) {
    const ToyProblem toy;
    const Vector x = scalar(rng.uniform(1.0, 2.0));
    const Vector y = scalar(rng.uniform(-1.0, 1.0));
    const Vector v = scalar(rng.uniform(0.5, 1.5));
    const Vector exact = *toy.hess_yy_g(x, y) * v;
    double prev = (fd_hvp(toy, x, y, v, FdConfig{1e-3}) - exact).norm();
    for (double delta : {5e-4, 2.5e-4}) {
      const double err = (fd_hvp(toy, x, y, v, FdConfig{delta}) - exact).norm();
      EXPECT_GE(prev / err, 1.8) << "delta " << delta;
      prev = err;
    }
  });
}

TEST(FdHvpProperty, BiasBoundAgainstClampedProduct) {
  const SmoothnessConstants c = ToyProblem::constants();
  for_all(35, 200, [&](Rng& rng) {
    const ToyProblem toy;
    const Vector x = scalar(rng.uniform(1.0, 2.0));
    const Vector y = scalar(rng.uniform(-0.5, 0.5));
    const Vector v = scalar(rng.uniform(-1.0, 1.0) * c.default_r_v());
    const double delta = std::pow(10.0, -rng.uniform(3.0, 6.0));
    const double r_v = c.default_r_v();
    const Vector clamped = clamp_spectrum(*toy.hess_yy_g(x, y), c.mu, c.l_g).apply(v);
    const Vector estimate = cap_norm(fd_hvp(toy, x, y, v, FdConfig{delta}), r_v * c.l_g);
    EXPECT_LE((estimate - clamped).norm(), c.l_gyy * r_v * r_v * delta);
  });
}

TEST(CapNorm, FdLimitReachesClampedProduct) {
  // Interior toy point whose Hessian 3 (1 + cos 0.6) lies in [1, 10].
  const ToyProblem toy;
  const Vector x = scalar(1.5);
  const Vector y = scalar(0.3);
  const Vector v = scalar(1.0);
  const Vector target = clamp_spectrum(*toy.hess_yy_g(x, y), 1.0, 10.0).apply(v);
  double prev = (cap_norm(fd_hvp(toy, x, y, v, FdConfig{1e-2}), 80.0) - target).norm();
  for (double delta : {5e-3, 2.5e-3, 1.25e-3}) {
    const double err = (cap_norm(fd_hvp(toy, x, y, v, FdConfig{delta}), 80.0) - target).norm();
    EXPECT_GE(prev / err, 2.0) << delta;
    prev = err;
  }
}

TEST(SurrogateHypergrad, ZeroDirectionIsUpperGradient) {
  const ToyProblem toy;
  const Vector x = scalar(1.2);
  const Vector y = scalar(-0.4);
  EXPECT_EQ(surrogate_hypergrad(toy, x, y, scalar(0.0), FdConfig{}), toy.grad_x_f(x, y));
}

TEST(SurrogateHypergrad, PLGameSubtractsCouplingProduct) {
  PLGameParams params;
  params.d = 8;
  params.l = 4;
  params.seed = 5;
  const PLGameProblem problem = gen_plgame(params);
  const PLGameOracle oracle(problem);
  Rng rng(6);
  const Vector x = rng.normal_vector(8);
  const Vector y = rng.normal_vector(8);
  const Vector v = rng.normal_vector(8);
  const Vector want = problem.P * x + problem.R1 * y - problem.R2 * v;
  EXPECT_LE((surrogate_hypergrad(oracle, x, y, v, FdConfig{}) - want).norm(), 1e-10);
}

TEST(SurrogateHypergrad, ToyCrossDerivativeVanishesAtZero) {
  const ToyProblem toy;
  const Vector x = scalar(1.5);
  const Vector y = scalar(0.0);
  const Vector w = surrogate_hypergrad(toy, x, y, scalar(0.2), FdConfig{});
  EXPECT_NEAR(w(0), toy.grad_x_f(x, y)(0), 1e-15);
}

TEST(SurrogateHypergrad, ThreeGradientCalls) {
  const ToyProblem toy;
  CountingOracle counter(toy);
  surrogate_hypergrad(counter, scalar(1.5), scalar(0.3), scalar(1.0), FdConfig{});
  EXPECT_EQ(counter.gradient_calls(), 3u);
  counter.reset();
  r_grad_estimate(counter, scalar(1.5), scalar(0.3), scalar(1.0), FdConfig{}, 80.0);
  EXPECT_EQ(counter.gradient_calls(), 3u);
}

TEST(RGradEstimate, ZeroDirectionIsNegatedLowerGradient) {
  const ToyProblem toy;
  const Vector x = scalar(1.5);
  const Vector y = scalar(0.3);
  EXPECT_EQ(r_grad_estimate(toy, x, y, scalar(0.0), FdConfig{}, 5.0), -toy.grad_y_f(x, y));
}

TEST(RGradEstimate, QuadraticInsideClampBounds) {
  Rng rng(7);
  const QuadraticOracle q = QuadraticOracle::random_spd_lower(rng, 4, 6, 0.5, 2.0);
  const Vector x = rng.normal_vector(4);
  const Vector y = rng.normal_vector(6);
  const Vector v = rng.normal_vector(6);
  const Vector want = q.Q() * v - q.grad_y_f(x, y);
  EXPECT_LE(rel_err(r_grad_estimate(q, x, y, v, FdConfig{}, 100.0), want), 1e-8);
}

TEST(RGradEstimate, FdLimitOnToy) {
  const ToyProblem toy;
  const Vector x = scalar(1.7);
  const Vector y = scalar(-0.2);
  const Vector v = scalar(0.8);
  const Vector target =
      clamp_spectrum(*toy.hess_yy_g(x, y), 1.0, 10.0).apply(v) - toy.grad_y_f(x, y);
  double prev = INFINITY;
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    const double err = (r_grad_estimate(toy, x, y, v, FdConfig{delta}, 80.0) - target).norm();
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LE(prev, 5e-8);
}

}  // namespace
}  // namespace hjfbio
