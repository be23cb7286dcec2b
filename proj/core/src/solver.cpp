#include "hjfbio/solver.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "hjfbio/errors.hpp"
#include "hjfbio/exact_oracle.hpp"
#include "hjfbio/rng.hpp"

namespace hjfbio {

void HyperParams::validate() const {
  auto require_positive = [](double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw InvalidArgument(std::string("hyperparameter ") + name +
                            " must be a positive finite number");
    }
  };
  require_positive(lambda, "lambda");
  require_positive(gamma, "gamma");
  require_positive(tau, "tau");
  require_positive(delta_eps, "delta_eps");
  require_positive(r_v, "r_v");
  require_positive(r_h, "r_h");
  if (mu) require_positive(*mu, "mu");
  if (l_g) require_positive(*l_g, "l_g");
  if (mu && l_g && *l_g < *mu) throw InvalidArgument("hyperparameters: requires l_g >= mu");
  if (l_g && r_h > r_v * *l_g) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "hyperparameters: r_h = " << r_h << " exceeds r_v * l_g = " << r_v * *l_g;
    throw InvalidArgument(msg.str());
  }
  if (iterations < 1) throw InvalidArgument("hyperparameters: iteration count T must be >= 1");
}

namespace {

void require_size(const Vector& v, Index n, const char* what) {
  if (v.size() != n) {
    throw InvalidArgument(std::string("solver: ") + what + " has dimension " +
                          std::to_string(v.size()) + ", expected " + std::to_string(n));
  }
}

}  // namespace

StepResult hjfbio_step(const SolverState& state, const HyperParams& hp, const BilevelOracle& oracle,
                       const Regularizer& reg) {
  const Vector& x = state.x;
  const Vector& y = state.y;
  const Vector& v = state.v;
  const FdConfig fd = hp.fd();

  const Vector u = oracle.grad_y_g(x, y);
  require_size(u, y.size(), "grad_y g");
  const Vector w = surrogate_hypergrad(oracle, x, y, v, fd);
  require_size(w, x.size(), "surrogate hypergradient");
  const Vector h = r_grad_estimate(oracle, x, y, v, fd, hp.r_h);
  require_size(h, y.size(), "auxiliary gradient");

  StepResult out;
  SolverState& next = out.next;
  next.t = state.t + 1;
  next.y = y - hp.lambda * u;
  next.x = prox_step(x, w, hp.gamma, reg);
  next.v = project_ball(v - hp.tau * h, hp.r_v);
  next.gradient_calls = state.gradient_calls + kGradientCallsPerStep;

  if (!all_finite(next.y) || next.y.norm() > kLowerNormCap) {
    throw DivergenceError("y", state.t);
  }
  if (!all_finite(next.x)) throw DivergenceError("x", state.t);
  if (!all_finite(next.v)) throw DivergenceError("v", state.t);

  TraceRow& row = out.row;
  row.t = state.t;
  row.grad_map_norm_sq = ((x - next.x) / hp.gamma).squaredNorm();
  row.surrogate_norm = w.norm();
  row.lower_grad_norm = u.norm();
  row.v_residual_norm = h.norm();
  row.f_val = oracle.f(x, y);
  row.g_val = oracle.g(x, y);
  row.gradient_calls = next.gradient_calls;
  return out;
}

void fill_exact_columns(const BilevelOracle& oracle, const HyperParams& hp, const Regularizer& reg,
                        const SolverState& state, const TraceOptions& options, TraceRow& row) {
  if (!options.any_exact()) return;
  if (!hp.mu || !hp.l_g) {
    throw Unsupported("exact trace columns need the clamp bounds mu and l_g");
  }
  if (options.lower_gap) {
    const auto lower = oracle.lower_value(state.x);
    if (!lower) throw Unsupported("lower_gap column needs a closed-form lower value");
    row.lower_gap = oracle.g(state.x, state.y) - *lower;
  }
  if (options.lyapunov) {
    row.lyapunov = lyapunov(oracle, state.x, state.y, state.v, reg, *hp.mu, *hp.l_g);
  }
  if (options.exact_grad_map) {
    const Vector grad = true_hypergrad(oracle, state.x, *hp.mu, *hp.l_g);
    row.exact_grad_map_norm_sq = gradient_mapping(state.x, grad, hp.gamma, reg).squaredNorm();
  }
}

RunResult run(const BilevelOracle& oracle, const HyperParams& hp, const Regularizer& reg,
              SolverState initial, const TraceOptions& options, const RunCallbacks& callbacks) {
  hp.validate();
  hp.fd().validate();
  require_size(initial.x, oracle.upper_dim(), "x_1");
  require_size(initial.y, oracle.lower_dim(), "y_1");
  if (initial.v.size() == 0) initial.v = Vector::Zero(oracle.lower_dim());
  require_size(initial.v, oracle.lower_dim(), "v_1");
  initial.v = project_ball(initial.v, hp.r_v);
  initial.t = 1;
  initial.gradient_calls = 0;

  Rng pick(hp.seed);
  RunResult result;
  result.t_out = 1 + static_cast<long>(pick.below(static_cast<std::uint64_t>(hp.iterations)));
  result.trace.reserve(static_cast<std::size_t>(hp.iterations));

  const auto start = std::chrono::steady_clock::now();
  SolverState state = std::move(initial);
  for (long t = 1; t <= hp.iterations; ++t) {
    if (t == result.t_out) result.x_out = state.x;
    if (t == hp.iterations) {
      result.x_final = state.x;
      result.y_final = state.y;
    }
    StepResult step;
    try {
      step = hjfbio_step(state, hp, oracle, reg);
    } catch (const DivergenceError& e) {
      result.divergence = e.what();
      break;
    }
    fill_exact_columns(oracle, hp, reg, state, options, step.row);
    if (callbacks.on_row) callbacks.on_row(state, step.row);
    if (options.wall_time) {
      step.row.wall_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
    }
    result.trace.push_back(std::move(step.row));
    state = std::move(step.next);
  }
  result.wall_time_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start)
          .count();
  result.gradient_calls = state.gradient_calls;
  if (result.divergence) {
    // Report the last iterate that was still well defined.
    result.x_final = state.x;
    result.y_final = state.y;
    if (result.x_out.size() == 0) result.x_out = state.x;
  }
  result.after = std::move(state);
  return result;
}

}  // namespace hjfbio
