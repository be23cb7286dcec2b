#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>

#include "hjfbio/errors.hpp"
#include "hjfbio/instance.hpp"
#include "hjfbio/matrix_sensing.hpp"
#include "hjfbio/pl_game.hpp"
#include "hjfbio/quadratic.hpp"
#include "hjfbio/sym_eigen.hpp"
#include "hjfbio/toy_problem.hpp"
#include "testing.hpp"

namespace hjfbio {
namespace {

using testing::for_all;
using testing::scalar;

/// Central differences of f and g at (x, y), one coordinate at a time.
struct FdGradients {
  Vector fx, fy, gx, gy;
};

FdGradients numeric_gradients(const BilevelOracle& o, const Vector& x, const Vector& y,
                              double h = 1e-6) {
  auto partial = [&](auto fn, const Vector& base, bool upper) {
    Vector out(base.size());
    for (Index i = 0; i < base.size(); ++i) {
      Vector plus = base, minus = base;
      plus(i) += h;
      minus(i) -= h;
      out(i) =
          upper ? (fn(plus, y) - fn(minus, y)) / (2 * h) : (fn(x, plus) - fn(x, minus)) / (2 * h);
    }
    return out;
  };
  auto f = [&](const Vector& a, const Vector& b) { return o.f(a, b); };
  auto g = [&](const Vector& a, const Vector& b) { return o.g(a, b); };
  return {partial(f, x, true), partial(f, y, false), partial(g, x, true), partial(g, y, false)};
}

void expect_gradients_match(const BilevelOracle& o, const Vector& x, const Vector& y, double tol) {
  const FdGradients fd = numeric_gradients(o, x, y);
  EXPECT_LE((o.grad_x_f(x, y) - fd.fx).norm(), tol * (1.0 + fd.fx.norm()));
  EXPECT_LE((o.grad_y_f(x, y) - fd.fy).norm(), tol * (1.0 + fd.fy.norm()));
  EXPECT_LE((o.grad_x_g(x, y) - fd.gx).norm(), tol * (1.0 + fd.gx.norm()));
  EXPECT_LE((o.grad_y_g(x, y) - fd.gy).norm(), tol * (1.0 + fd.gy.norm()));
}

// Toy problem

TEST(Toy, ClosedFormValues) {
  const ToyProblem toy;
  const double s = std::sin(0.3);
  EXPECT_DOUBLE_EQ(toy.f(scalar(1.5), scalar(0.3)), 2.25 + 0.09 + 4.5 * s * s);
  EXPECT_DOUBLE_EQ(toy.g(scalar(1.5), scalar(0.3)), 1.5 * (0.09 + s * s));
  EXPECT_EQ(*toy.lower_solution(scalar(1.2)), scalar(0.0));
  EXPECT_EQ(*toy.lower_value(scalar(1.2)), 0.0);
  EXPECT_FALSE(toy.lower_solution(scalar(-1.0)).has_value());
  EXPECT_DOUBLE_EQ(*toy.upper_value(scalar(1.7)), 1.7 * 1.7);
}

TEST(Toy, HessianVanishesAtHalfPi) {
  const ToyProblem toy;
  EXPECT_NEAR((*toy.hess_yy_g(scalar(1.5), scalar(std::numbers::pi / 2)))(0, 0), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ((*toy.hess_yy_g(scalar(1.5), scalar(0.0)))(0, 0), 6.0);
}

TEST(ToyProperty, GradientsMatchFiniteDifferences) {
  for_all(61, 50, [](Rng& rng) {
    expect_gradients_match(ToyProblem(), scalar(rng.uniform(1.0, 2.0)),
                           scalar(rng.uniform(-1.0, 1.0)), 1e-8);
  });
}

TEST(ToyProperty, SecondOrderHooksMatchFiniteDifferences) {
  for_all(62, 50, [](Rng& rng) {
    const ToyProblem toy;
    const Vector x = scalar(rng.uniform(1.0, 2.0));
    const Vector y = scalar(rng.uniform(-1.0, 1.0));
    const double h = 1e-6;
    const double yy =
        (toy.grad_y_g(x, y + scalar(h)) - toy.grad_y_g(x, y - scalar(h)))(0) / (2 * h);
    const double xy =
        (toy.grad_x_g(x, y + scalar(h)) - toy.grad_x_g(x, y - scalar(h)))(0) / (2 * h);
    EXPECT_NEAR((*toy.hess_yy_g(x, y))(0, 0), yy, 1e-8);
    EXPECT_NEAR((*toy.hess_xy_g(x, y))(0, 0), xy, 1e-8);
  });
}

TEST(ToyProperty, LowerProblemIsPL) {
  // (1/2)|grad_y g|^2 >= mu (g - G) with mu = 1 on [1, 2] x [-3, 3].
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 60; ++j) {
      const Vector x = scalar(1.0 + 0.05 * i);
      const Vector y = scalar(-3.0 + 0.1 * j);
      const ToyProblem toy;
      EXPECT_GE(0.5 * toy.grad_y_g(x, y).squaredNorm() + 1e-15, toy.g(x, y) - *toy.lower_value(x))
          << x(0) << ", " << y(0);
    }
  }
}

TEST(ToyProperty, ConstantsBoundDerivativesOnDomain) {
  const SmoothnessConstants c = ToyProblem::constants();
  for_all(63, 200, [&](Rng& rng) {
    const ToyProblem toy;
    const Vector x = scalar(rng.uniform(1.0, 2.0));
    const Vector y = scalar(rng.uniform(-1.0, 1.0));
    EXPECT_LE(toy.grad_y_f(x, y).norm(), c.c_fy);
    EXPECT_LE(toy.grad_x_f(x, y).norm(), c.c_fx);
    EXPECT_LE(toy.grad_y_g(x, y).norm(), c.c_gy);
    EXPECT_LE(toy.hess_xy_g(x, y)->norm(), c.c_gxy);
  });
}

// PL game

PLGameParams small_plgame(std::uint64_t seed, bool projected = false) {
  PLGameParams p;
  p.d = 10;
  p.l = 5;
  p.seed = seed;
  p.project_coupling = projected;
  return p;
}

TEST(PLGame, DeterministicInSeed) {
  const PLGameProblem a = gen_plgame(small_plgame(4));
  const PLGameProblem b = gen_plgame(small_plgame(4));
  const PLGameProblem c = gen_plgame(small_plgame(5));
  EXPECT_EQ(a.P.dense(), b.P.dense());
  EXPECT_EQ(a.R2.dense(), b.R2.dense());
  EXPECT_EQ(a.y0, b.y0);
  EXPECT_NE(a.Q.dense(), c.Q.dense());
}

TEST(PLGame, CovariancesHaveRankL) {
  const PLGameProblem p = gen_plgame(small_plgame(1));
  for (const SymMatrix* m : {&p.P, &p.Q}) {
    const Vector ev = sym_eigen(*m).eigenvalues;
    const auto big =
        std::count_if(ev.data(), ev.data() + ev.size(), [](double e) { return e > 1e-8; });
    const auto small = std::count_if(ev.data(), ev.data() + ev.size(),
                                     [](double e) { return std::abs(e) < 1e-8; });
    EXPECT_LE(big, 5);
    EXPECT_GE(small, 5);
  }
}

TEST(PLGame, RejectsBadParameters) {
  PLGameParams p = small_plgame(0);
  p.l = p.d;
  EXPECT_THROW(gen_plgame(p), InvalidArgument);
  p = small_plgame(0);
  p.mu = 2.0;
  EXPECT_THROW(gen_plgame(p), InvalidArgument);
}

TEST(PLGame, GradientsMatchClosedForms) {
  const PLGameProblem p = gen_plgame(small_plgame(2));
  const PLGameOracle o(p);
  Rng rng(3);
  const Vector x = rng.normal_vector(10);
  const Vector y = rng.normal_vector(10);
  EXPECT_LE((o.grad_x_f(x, y) - (p.P * x + p.R1 * y)).norm(), 1e-14);
  EXPECT_LE((o.grad_y_f(x, y) - p.R1 * x).norm(), 1e-14);
  EXPECT_LE((o.grad_x_g(x, y) - p.R2 * y).norm(), 1e-14);
  EXPECT_LE((o.grad_y_g(x, y) - (p.Q * y + p.R2 * x)).norm(), 1e-14);
  EXPECT_FALSE(o.lower_solution(x).has_value());
  expect_gradients_match(o, x, y, 1e-7);
}

TEST(PLGame, ProjectedCouplingHasLowerSolution) {
  const PLGameProblem p = gen_plgame(small_plgame(2, true));
  const PLGameOracle o(p);
  ASSERT_TRUE(o.projected());
  Rng rng(4);
  const Vector x = rng.normal_vector(10);
  const Vector ys = *o.lower_solution(x);
  EXPECT_LE(o.grad_y_g(x, ys).norm(), 1e-12 * (1.0 + x.norm()));
  EXPECT_NEAR(*o.lower_value(x), o.g(x, ys), 1e-14);
}

TEST(PLGameProperty, LowerProblemSatisfiesPLInequality) {
  const PLGameOracle o(gen_plgame(small_plgame(7, true)));
  const double mu = o.min_nonzero_q_eigenvalue();
  ASSERT_GT(mu, 0.0);
  for_all(64, 100, [&](Rng& rng) {
    const Vector x = rng.normal_vector(10);
    const Vector y = rng.normal_vector(10, 0.0, 3.0);
    const double gap = o.g(x, y) - *o.lower_value(x);
    EXPECT_GE(gap, -1e-12);
    EXPECT_GE(0.5 * o.grad_y_g(x, y).squaredNorm(), mu * gap * (1.0 - 1e-9));
  });
}

// Matrix sensing

MatrixSensingParams small_matsense(std::uint64_t seed) {
  MatrixSensingParams p;
  p.d = 6;
  p.r = 3;
  p.n = 100;
  p.seed = seed;
  return p;
}

TEST(MatrixSensing, SplitsPartitionSamples) {
  const MatrixSensingProblem p = gen_matsense(small_matsense(1));
  EXPECT_EQ(p.train.size(), 40u);
  EXPECT_EQ(p.val.size(), 60u);
  EXPECT_TRUE(std::is_sorted(p.train.begin(), p.train.end()));
  EXPECT_TRUE(std::is_sorted(p.val.begin(), p.val.end()));
  std::set<Index> all(p.train.begin(), p.train.end());
  all.insert(p.val.begin(), p.val.end());
  EXPECT_EQ(all.size(), 100u);
}

TEST(MatrixSensing, NoiselessLabelsVanishAtGroundTruth) {
  const MatrixSensingProblem p = gen_matsense(small_matsense(2));
  for (std::size_t i = 0; i < p.C.size(); ++i) {
    EXPECT_LE(sensing_sample_loss(p.C[i], p.o(static_cast<Index>(i)), p.U_star), 1e-24);
  }
}

TEST(MatrixSensing, MetricsAtReferencePoints) {
  const MatrixSensingProblem p = gen_matsense(small_matsense(3));
  const SensingMetrics at_star = sensing_metrics(p, p.U_star);
  EXPECT_LE(at_star.loss, 1e-24);
  EXPECT_LE(at_star.distance, 1e-28);
  EXPECT_DOUBLE_EQ(sensing_metrics(p, Matrix::Zero(6, 3)).distance, 1.0);
  EXPECT_LE(sensing_metrics(p, -p.U_star).distance, 1e-28);
  EXPECT_THROW(sensing_metrics(p, Matrix::Zero(6, 2)), InvalidArgument);
}

TEST(MatrixSensing, SampleGradientMatchesFiniteDifferences) {
  Rng rng(5);
  const Matrix c = rng.normal_matrix(6, 6);
  const Matrix u = rng.normal_matrix(6, 2);
  const double o = 0.7;
  const Matrix grad = sensing_sample_grad(c, o, u);
  const double h = 1e-6;
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j < 2; ++j) {
      Matrix plus = u, minus = u;
      plus(i, j) += h;
      minus(i, j) -= h;
      const double fd =
          (sensing_sample_loss(c, o, plus) - sensing_sample_loss(c, o, minus)) / (2 * h);
      EXPECT_NEAR(grad(i, j), fd, 1e-6 * (1.0 + std::abs(fd)));
    }
  }
}

TEST(MatrixSensing, FactorSplitRoundTrips) {
  const MatrixSensingProblem p = gen_matsense(small_matsense(4));
  EXPECT_EQ(p.assemble(p.upper_part(p.U_star), p.lower_part(p.U_star)), p.U_star);
  EXPECT_EQ(p.upper_part(p.U_star).size(), 12);
  EXPECT_EQ(p.lower_part(p.U_star), p.U_star.col(2));
}

TEST(MatrixSensingProperty, OracleGradientsMatchFiniteDifferences) {
  const MatrixSensingProblem p = gen_matsense(small_matsense(6));
  const MatrixSensingOracle o(p);
  for_all(65, 5, [&](Rng& rng) {
    const Vector x = rng.normal_vector(12, 0.0, 0.5);
    const Vector y = rng.normal_vector(6, 0.0, 0.5);
    expect_gradients_match(o, x, y, 1e-6);
  });
}

TEST(MatrixSensingProperty, SecondOrderHooksMatchDifferencedGradients) {
  const MatrixSensingProblem p = gen_matsense(small_matsense(7));
  const MatrixSensingOracle o(p);
  for_all(66, 5, [&](Rng& rng) {
    const Vector x = rng.normal_vector(12, 0.0, 0.5);
    const Vector y = rng.normal_vector(6, 0.0, 0.5);
    const Vector v = rng.normal_vector(6);
    const double h = 1e-6;
    const Vector hvp = (o.grad_y_g(x, y + h * v) - o.grad_y_g(x, y - h * v)) / (2 * h);
    const Vector jvp = (o.grad_x_g(x, y + h * v) - o.grad_x_g(x, y - h * v)) / (2 * h);
    EXPECT_LE((*o.hess_yy_g(x, y) * v - hvp).norm(), 1e-6 * (1.0 + hvp.norm()));
    EXPECT_LE((*o.hess_xy_g(x, y) * v - jvp).norm(), 1e-6 * (1.0 + jvp.norm()));
  });
}

TEST(MatrixSensing, RejectsBadParameters) {
  MatrixSensingParams p = small_matsense(0);
  p.r = 1;
  EXPECT_THROW(gen_matsense(p), InvalidArgument);
  p = small_matsense(0);
  p.init_scale = -1.0;
  EXPECT_THROW(gen_matsense(p), InvalidArgument);
}

// Dense quadratic helper

TEST(QuadraticProperty, GradientsAndLowerSolution) {
  for_all(67, 20, [](Rng& rng) {
    const QuadraticOracle q = QuadraticOracle::random_spd_lower(rng, 3, 4, 0.5, 2.0);
    const Vector x = rng.normal_vector(3);
    expect_gradients_match(q, x, rng.normal_vector(4), 1e-8);
    const Vector ys = *q.lower_solution(x);
    EXPECT_LE(q.grad_y_g(x, ys).norm(), 1e-12 * (1.0 + x.norm()));
    EXPECT_NEAR(*q.lower_value(x), q.g(x, ys), 1e-12);
  });
}

TEST(Quadratic, ShapeMismatchRejected) {
  EXPECT_THROW(QuadraticOracle(SymMatrix(2), Matrix::Zero(2, 3), SymMatrix(3), SymMatrix(3),
                               Matrix::Zero(3, 3)),
               InvalidArgument);
}

// Instances and snapshots

TEST(Instance, SuggestedHyperparametersRespectCap) {
  for (const ProblemInstance& inst : {make_toy_instance(), make_plgame_instance(small_plgame(1)),
                                      make_matsense_instance(small_matsense(1))}) {
    const HyperParams hp = inst.suggested_hyperparams();
    EXPECT_NO_THROW(hp.validate()) << inst.kind;
    EXPECT_EQ(inst.initial.x.size(), inst.oracle->upper_dim());
    EXPECT_EQ(inst.initial.y.size(), inst.oracle->lower_dim());
  }
}

TEST(Snapshot, RoundTripsEveryKind) {
  const std::vector<ProblemInstance> originals = {make_toy_instance(),
                                                  make_plgame_instance(small_plgame(8, true)),
                                                  make_matsense_instance(small_matsense(8))};
  Rng rng(9);
  for (const ProblemInstance& a : originals) {
    const std::string text = snapshot_json(a);
    const ProblemInstance b = instance_from_snapshot_json(text);
    EXPECT_EQ(b.kind, a.kind);
    EXPECT_EQ(snapshot_json(b), text) << a.kind;
    EXPECT_EQ(b.initial.x, a.initial.x);
    EXPECT_EQ(b.initial.y, a.initial.y);
    const Vector x = rng.normal_vector(a.oracle->upper_dim());
    const Vector y = rng.normal_vector(a.oracle->lower_dim());
    EXPECT_EQ(b.oracle->f(x, y), a.oracle->f(x, y)) << a.kind;
    EXPECT_EQ(b.oracle->grad_y_g(x, y), a.oracle->grad_y_g(x, y)) << a.kind;
  }
}

TEST(Snapshot, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "hjfbio_snapshot_test.json";
  const ProblemInstance a = make_plgame_instance(small_plgame(10));
  save_snapshot(a, path);
  const ProblemInstance b = load_snapshot(path);
  std::filesystem::remove(path);
  EXPECT_EQ(b.plgame->Q.dense(), a.plgame->Q.dense());
}

TEST(Snapshot, MalformedInputRejected) {
  EXPECT_THROW(instance_from_snapshot_json("{not json"), InvalidArgument);
  EXPECT_THROW(instance_from_snapshot_json(R"({"format": "other", "version": 1})"),
               InvalidArgument);
  EXPECT_THROW(
      instance_from_snapshot_json(R"({"format": "hjfbio-problem", "version": 99, "kind": "toy"})"),
      InvalidArgument);
  EXPECT_THROW(instance_from_snapshot_json(
                   R"({"format": "hjfbio-problem", "version": 1, "kind": "banana"})"),
               InvalidArgument);
  std::string text = snapshot_json(make_plgame_instance(small_plgame(11)));
  const auto pos = text.find("\"P\"");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 3, "\"Z\"");
  EXPECT_THROW(instance_from_snapshot_json(text), InvalidArgument);
  EXPECT_THROW(load_snapshot("/nonexistent/dir/file.json"), InvalidArgument);
}

}  // namespace
}  // namespace hjfbio
