#include <benchmark/benchmark.h>

#include "hjfbio/estimators.hpp"
#include "hjfbio/instance.hpp"
#include "hjfbio/quadratic.hpp"
#include "hjfbio/solver.hpp"
#include "hjfbio/sym_eigen.hpp"

namespace {

using namespace hjfbio;

void BM_FdHvpQuadratic(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  Rng rng(1);
  const QuadraticOracle q = QuadraticOracle::random(rng, n, n);
  const Vector x = rng.normal_vector(n);
  const Vector y = rng.normal_vector(n);
  const Vector v = rng.normal_vector(n);
  for (auto _ : state) benchmark::DoNotOptimize(fd_hvp(q, x, y, v, FdConfig{}));
}
BENCHMARK(BM_FdHvpQuadratic)->RangeMultiplier(4)->Range(4, 256);

void step_benchmark(benchmark::State& state, const ProblemInstance& inst) {
  const HyperParams hp = inst.suggested_hyperparams();
  SolverState s = inst.initial;
  for (auto _ : state) {
    StepResult r = hjfbio_step(s, hp, *inst.oracle, inst.regularizer);
    benchmark::DoNotOptimize(r.next.x.data());
  }
}

void BM_StepToy(benchmark::State& state) { step_benchmark(state, make_toy_instance()); }
BENCHMARK(BM_StepToy);

void BM_StepPLGame(benchmark::State& state) {
  PLGameParams p;
  p.d = static_cast<Index>(state.range(0));
  p.l = p.d / 2;
  step_benchmark(state, make_plgame_instance(p));
}
BENCHMARK(BM_StepPLGame)->Arg(20)->Arg(100);

void BM_StepMatrixSensing(benchmark::State& state) {
  MatrixSensingParams p;
  p.d = static_cast<Index>(state.range(0));
  step_benchmark(state, make_matsense_instance(p));
}
BENCHMARK(BM_StepMatrixSensing)->Arg(10)->Arg(20);

void BM_SymEigen(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  Rng rng(2);
  const SymMatrix m = SymMatrix::from_upper(rng.normal_matrix(n, n));
  for (auto _ : state) benchmark::DoNotOptimize(sym_eigen(m).eigenvalues.data());
}
BENCHMARK(BM_SymEigen)->RangeMultiplier(2)->Range(4, 64);

}  // namespace

BENCHMARK_MAIN();
