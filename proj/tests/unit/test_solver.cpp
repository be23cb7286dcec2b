#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "hjfbio/constants.hpp"
#include "hjfbio/errors.hpp"
#include "hjfbio/quadratic.hpp"
#include "hjfbio/solver.hpp"
#include "hjfbio/toy_problem.hpp"
#include "testing.hpp"

namespace hjfbio {
namespace {

using testing::for_all;
using testing::scalar;

HyperParams toy_params(long iterations) {
  HyperParams hp;
  hp.lambda = 0.05;
  hp.gamma = 0.02;
  hp.tau = 0.015;
  hp.delta_eps = 1e-5;
  hp.r_v = 8.0;
  hp.r_h = 80.0;
  hp.mu = 1.0;
  hp.l_g = 10.0;
  hp.iterations = iterations;
  return hp;
}

/// The scalar step written out from the toy closed forms.
struct ScalarStep {
  double x, y, v;
};

ScalarStep toy_step_by_hand(double x, double y, double v, const HyperParams& hp) {
  const double d = hp.delta_eps;
  auto gy_g = [&](double yy) { return 2 * x * yy + x * std::sin(2 * yy); };
  auto gx_g = [&](double yy) { return yy * yy + std::sin(yy) * std::sin(yy); };
  const double u = gy_g(y);
  const double jvp = (gx_g(y + d * v) - gx_g(y - d * v)) / (2 * d);
  const double w = 2 * x + 3 * std::sin(y) * std::sin(y) - jvp;
  double hvp = (gy_g(y + d * v) - gy_g(y - d * v)) / (2 * d);
  hvp = std::clamp(hvp, -hp.r_h, hp.r_h);
  const double h = hvp - (2 * y + 3 * x * std::sin(2 * y));
  return {std::clamp(x - hp.gamma * w, 1.0, 2.0), y - hp.lambda * u,
          std::clamp(v - hp.tau * h, -hp.r_v, hp.r_v)};
}

TEST(HyperParams, Validation) {
  EXPECT_NO_THROW(toy_params(10).validate());
  auto broken = [](auto mutate) {
    HyperParams hp = toy_params(10);
    mutate(hp);
    return hp;
  };
  EXPECT_THROW(broken([](HyperParams& h) { h.lambda = 0; }).validate(), InvalidArgument);
  EXPECT_THROW(broken([](HyperParams& h) { h.gamma = -1; }).validate(), InvalidArgument);
  EXPECT_THROW(broken([](HyperParams& h) { h.tau = NAN; }).validate(), InvalidArgument);
  EXPECT_THROW(broken([](HyperParams& h) { h.delta_eps = 0; }).validate(), InvalidArgument);
  EXPECT_THROW(broken([](HyperParams& h) { h.r_v = 0; }).validate(), InvalidArgument);
  EXPECT_THROW(broken([](HyperParams& h) { h.r_h = INFINITY; }).validate(), InvalidArgument);
  EXPECT_THROW(broken([](HyperParams& h) { h.mu = 20.0; }).validate(), InvalidArgument);
  EXPECT_THROW(broken([](HyperParams& h) { h.r_h = 81.0; }).validate(), InvalidArgument);
  EXPECT_THROW(broken([](HyperParams& h) { h.iterations = 0; }).validate(), InvalidArgument);
}

TEST(HjfbioStep, MatchesScalarTranscription) {
  const HyperParams hp = toy_params(1);
  const ToyProblem toy;
  SolverState s = ToyProblem::initial_state();
  double x = 1.5, y = 0.3, v = 0.0;
  for (int k = 0; k < 20; ++k) {
    const StepResult r = hjfbio_step(s, hp, toy, ToyProblem::regularizer());
    const ScalarStep want = toy_step_by_hand(x, y, v, hp);
    EXPECT_NEAR(r.next.x(0), want.x, 1e-12);
    EXPECT_NEAR(r.next.y(0), want.y, 1e-12);
    EXPECT_NEAR(r.next.v(0), want.v, 1e-12);
    EXPECT_EQ(r.next.t, s.t + 1);
    EXPECT_EQ(r.row.t, s.t);
    s = r.next;
    x = s.x(0), y = s.y(0), v = s.v(0);
  }
}

TEST(HjfbioStep, RowDescribesCurrentState) {
  const HyperParams hp = toy_params(1);
  const ToyProblem toy;
  const SolverState s = ToyProblem::initial_state();
  const StepResult r = hjfbio_step(s, hp, toy, ToyProblem::regularizer());
  EXPECT_EQ(r.row.f_val, toy.f(s.x, s.y));
  EXPECT_EQ(r.row.g_val, toy.g(s.x, s.y));
  EXPECT_EQ(r.row.lower_grad_norm, toy.grad_y_g(s.x, s.y).norm());
  EXPECT_NEAR(r.row.grad_map_norm_sq, std::pow((s.x(0) - r.next.x(0)) / hp.gamma, 2), 1e-12);
  EXPECT_EQ(r.row.gradient_calls, kGradientCallsPerStep);
}

TEST(HjfbioStep, ZeroRatesLeaveStateUnchanged) {
  // Tiny positive rates underflow relative to the iterates.
  HyperParams hp = toy_params(1);
  hp.lambda = hp.gamma = hp.tau = 1e-300;
  SolverState s = ToyProblem::initial_state();
  s.v = scalar(0.5);
  const StepResult r = hjfbio_step(s, hp, ToyProblem(), ToyProblem::regularizer());
  EXPECT_EQ(r.next.x, s.x);
  EXPECT_EQ(r.next.y, s.y);
  EXPECT_EQ(r.next.v, s.v);
}

TEST(HjfbioStep, ToyStationaryPointIsFixed) {
  // x = 1 is the constrained minimizer of F(x) = x^2 on [1, 2]; y* = 0 and
  // v* = grad_y f / hess_yy g = 0 there.
  SolverState s;
  s.x = scalar(1.0);
  s.y = scalar(0.0);
  s.v = scalar(0.0);
  const StepResult r = hjfbio_step(s, toy_params(1), ToyProblem(), ToyProblem::regularizer());
  EXPECT_NEAR(r.next.x(0), 1.0, 1e-10);
  EXPECT_NEAR(r.next.y(0), 0.0, 1e-10);
  EXPECT_NEAR(r.next.v(0), 0.0, 1e-10);
}

TEST(HjfbioStep, ZeroRegularizerMappingEqualsSurrogateNorm) {
  for_all(51, 30, [](Rng& rng) {
    const QuadraticOracle q = QuadraticOracle::random_spd_lower(rng, 3, 4, 0.5, 2.0);
    SolverState s;
    s.x = rng.normal_vector(3);
    s.y = rng.normal_vector(4);
    s.v = rng.normal_vector(4);
    const StepResult r = hjfbio_step(s, toy_params(1), q, Regularizer::zero());
    EXPECT_NEAR(r.row.grad_map_norm_sq, r.row.surrogate_norm * r.row.surrogate_norm,
                1e-9 * (1.0 + r.row.grad_map_norm_sq));
  });
}

TEST(HjfbioStep, AuxiliaryStaysInBall) {
  for_all(52, 30, [](Rng& rng) {
    const QuadraticOracle q = QuadraticOracle::random(rng, 2, 3);
    HyperParams hp = toy_params(1);
    hp.tau = rng.uniform(0.1, 5.0);
    hp.r_v = rng.uniform(0.1, 2.0);
    hp.l_g.reset();
    SolverState s;
    s.x = rng.normal_vector(2);
    s.y = rng.normal_vector(3);
    s.v = project_ball(rng.normal_vector(3, 0.0, 3.0), hp.r_v);
    const StepResult r = hjfbio_step(s, hp, q, Regularizer::zero());
    EXPECT_LE(r.next.v.norm(), hp.r_v * (1.0 + 1e-12));
  });
}

TEST(Run, SingleIterationOutputsInitialPoint) {
  const RunResult r =
      run(ToyProblem(), toy_params(1), ToyProblem::regularizer(), ToyProblem::initial_state());
  EXPECT_EQ(r.t_out, 1);
  EXPECT_EQ(r.x_out, scalar(1.5));
  EXPECT_EQ(r.x_final, scalar(1.5));
  EXPECT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.after.t, 2);
}

TEST(Run, CountsSevenCallsPerIteration) {
  const ToyProblem toy;
  CountingOracle counter(toy);
  for (long T : {1L, 10L, 137L}) {
    counter.reset();
    const RunResult r =
        run(counter, toy_params(T), ToyProblem::regularizer(), ToyProblem::initial_state());
    EXPECT_EQ(counter.gradient_calls(), 7u * static_cast<std::uint64_t>(T));
    EXPECT_EQ(r.gradient_calls, counter.gradient_calls());
    EXPECT_EQ(r.trace.back().gradient_calls, r.gradient_calls);
  }
}

TEST(Run, Deterministic) {
  HyperParams hp = toy_params(300);
  hp.seed = 9;
  const RunResult a = run(ToyProblem(), hp, ToyProblem::regularizer(), ToyProblem::initial_state());
  const RunResult b = run(ToyProblem(), hp, ToyProblem::regularizer(), ToyProblem::initial_state());
  EXPECT_EQ(a.t_out, b.t_out);
  EXPECT_EQ(a.x_out, b.x_out);
  EXPECT_EQ(a.after.y, b.after.y);
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].grad_map_norm_sq, b.trace[i].grad_map_norm_sq);
    EXPECT_EQ(a.trace[i].v_residual_norm, b.trace[i].v_residual_norm);
  }
}

TEST(Run, OutputIndexUniformAcrossSeeds) {
  std::vector<int> hits(4, 0);
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    HyperParams hp = toy_params(4);
    hp.seed = seed;
    const RunResult r =
        run(ToyProblem(), hp, ToyProblem::regularizer(), ToyProblem::initial_state());
    ASSERT_GE(r.t_out, 1);
    ASSERT_LE(r.t_out, 4);
    hits[static_cast<std::size_t>(r.t_out - 1)]++;
  }
  // Each count is Binomial(2000, 1/4): mean 500, sd ~19.4.
  for (int h : hits) EXPECT_NEAR(h, 500, 100);
}

TEST(Run, OutputIteratePicksTraceIndex) {
  HyperParams hp = toy_params(50);
  hp.seed = 3;
  const ToyProblem toy;
  const RunResult r = run(toy, hp, ToyProblem::regularizer(), ToyProblem::initial_state());
  SolverState s = ToyProblem::initial_state();
  for (long t = 1; t < r.t_out; ++t) s = hjfbio_step(s, hp, toy, ToyProblem::regularizer()).next;
  EXPECT_EQ(r.x_out, s.x);
}

TEST(Run, InitialAuxiliaryProjected) {
  SolverState init = ToyProblem::initial_state();
  init.v = scalar(100.0);
  const RunResult r = run(ToyProblem(), toy_params(1), ToyProblem::regularizer(), init);
  EXPECT_LE(std::abs(r.after.v(0)), 8.0);
}

TEST(Run, DimensionMismatchRejected) {
  SolverState init = ToyProblem::initial_state();
  init.y = Vector::Zero(2);
  EXPECT_THROW(run(ToyProblem(), toy_params(1), ToyProblem::regularizer(), init), InvalidArgument);
}

TEST(Run, DivergenceKeepsPartialTrace) {
  // y' = (1 - lambda * 10) y = -9 y grows past the cap after ~12 steps.
  const QuadraticOracle q(SymMatrix(1), Matrix::Zero(1, 1), SymMatrix(1),
                          SymMatrix::diagonal(Vector::Constant(1, 10.0)), Matrix::Zero(1, 1));
  HyperParams hp = toy_params(100);
  hp.lambda = 1.0;
  hp.l_g.reset();
  SolverState init;
  init.x = scalar(0.0);
  init.y = scalar(1.0);
  const RunResult r = run(q, hp, Regularizer::zero(), init);
  ASSERT_FALSE(r.ok());
  const long expected = static_cast<long>(std::ceil(std::log(kLowerNormCap) / std::log(9.0)));
  EXPECT_EQ(static_cast<long>(r.trace.size()), expected - 1);
  EXPECT_TRUE(all_finite(r.y_final));
  EXPECT_LE(r.y_final.norm(), kLowerNormCap);
}

TEST(Run, ExactColumnsNeedClampBounds) {
  HyperParams hp = toy_params(3);
  hp.mu.reset();
  TraceOptions opts;
  opts.lyapunov = true;
  EXPECT_THROW(run(ToyProblem(), hp, ToyProblem::regularizer(), ToyProblem::initial_state(), opts),
               Unsupported);
}

TEST(Run, ExactColumnsFilled) {
  TraceOptions opts;
  opts.lower_gap = opts.lyapunov = opts.exact_grad_map = true;
  const RunResult r = run(ToyProblem(), toy_params(5), ToyProblem::regularizer(),
                          ToyProblem::initial_state(), opts);
  const auto& first = r.trace.front();
  ASSERT_TRUE(first.lower_gap && first.lyapunov && first.exact_grad_map_norm_sq);
  EXPECT_NEAR(*first.lower_gap, 1.5 * (0.09 + std::pow(std::sin(0.3), 2)), 1e-15);
  // G(1.5, grad F = 3, gamma) = (1.5 - clip(1.5 - 0.06)) / 0.02 = 3.
  EXPECT_NEAR(*first.exact_grad_map_norm_sq, 9.0, 1e-9);
}

TEST(Run, CallbackSeesEveryRow) {
  RunCallbacks cb;
  cb.extra_columns = {"x"};
  cb.on_row = [](const SolverState& s, TraceRow& row) { row.extras.push_back(s.x(0)); };
  const RunResult r = run(ToyProblem(), toy_params(4), ToyProblem::regularizer(),
                          ToyProblem::initial_state(), {}, cb);
  ASSERT_EQ(r.trace.size(), 4u);
  EXPECT_EQ(r.trace[0].extras, std::vector<double>{1.5});
}

TEST(Run, ToyConvergesToConstrainedMinimizer) {
  const RunResult r =
      run(ToyProblem(), toy_params(2000), ToyProblem::regularizer(), ToyProblem::initial_state());
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r.x_final(0), 1.0, 1e-3);
  EXPECT_NEAR(r.y_final(0), 0.0, 1e-3);
}

TEST(Run, TheoremRatesDecreaseLyapunovOnToy) {
  const SmoothnessConstants c = ToyProblem::constants();
  HyperParams hp = toy_params(200);
  hp.lambda = std::min(1.0 / (2.0 * c.l_g), 3.0 / (80.0 * c.l_breve_sq()));
  hp.tau = 1.0 / (6.0 * c.l_g);
  hp.gamma = theorem1_step_sizes(c, hp.lambda, hp.tau, hp.r_v);
  hp.delta_eps = 1e-6;
  TraceOptions opts;
  opts.lyapunov = true;
  const RunResult r =
      run(ToyProblem(), hp, ToyProblem::regularizer(), ToyProblem::initial_state(), opts);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_LE(*r.trace[i].lyapunov, *r.trace[i - 1].lyapunov + 1e-6) << "t " << r.trace[i].t;
  }
}

}  // namespace
}  // namespace hjfbio
