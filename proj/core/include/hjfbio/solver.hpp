#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hjfbio/estimators.hpp"
#include "hjfbio/numerics.hpp"
#include "hjfbio/problem.hpp"
#include "hjfbio/regularizer.hpp"

namespace hjfbio {

/// First-order gradient evaluations made by one solver step: grad_y g,
/// grad_x f, grad_y f, and two each for the Jacobian and Hessian estimates.
inline constexpr std::uint64_t kGradientCallsPerStep = 7;

/// Iterates whose lower variable exceeds this norm are treated as diverged.
inline constexpr double kLowerNormCap = 1e12;

struct HyperParams {
  double lambda = 0.01;  // lower-level step
  double gamma = 0.01;   // upper-level step
  double tau = 0.01;     // auxiliary-variable step
  double delta_eps = 1e-5;
  double r_v = 10.0;   // radius of the auxiliary-variable ball
  double r_h = 100.0;  // cap on the Hessian-vector estimate
  /// Clamp bounds of the Hessian surrogate. Only the optional exact trace
  /// columns use them; when l_g is set, r_h <= r_v * l_g is enforced.
  std::optional<double> mu;
  std::optional<double> l_g;
  long iterations = 1000;  // T
  std::uint64_t seed = 0;  // drives the randomized output index

  /// Throws InvalidArgument naming the first violated constraint.
  void validate() const;
  FdConfig fd() const { return FdConfig{delta_eps}; }
};

struct SolverState {
  long t = 1;
  Vector x;
  Vector y;
  Vector v;
  std::uint64_t gradient_calls = 0;  // cumulative
};

/// Metrics of iteration t, all evaluated at (x_t, y_t, v_t).
struct TraceRow {
  long t = 0;
  double grad_map_norm_sq = 0.0;  // |G(x_t, w_t, gamma)|^2
  double surrogate_norm = 0.0;    // |w_t|
  double lower_grad_norm = 0.0;   // |grad_y g(x_t, y_t)|
  double v_residual_norm = 0.0;   // |h_t|
  double f_val = 0.0;
  double g_val = 0.0;
  std::optional<double> lower_gap;               // g(x_t, y_t) - G(x_t)
  std::optional<double> lyapunov;                // Psi_t
  std::optional<double> exact_grad_map_norm_sq;  // |G(x_t, grad F(x_t), gamma)|^2
  std::uint64_t gradient_calls = 0;              // cumulative, after step t
  std::optional<std::int64_t> wall_time_ns;      // since the start of the run
  std::vector<double> extras;                    // problem-specific columns
};

struct StepResult {
  SolverState next;
  TraceRow row;
};

/// One iteration. The three search directions
///
///   u = grad_y g(x, y)
///   w = grad_x f(x, y) - fd_jvp(x, y, v)
///   h = cap_norm(fd_hvp(x, y, v), r_h) - grad_y f(x, y)
///
/// are all evaluated at the current state before any variable moves; then
/// y' = y - lambda u, x' = prox_step(x, w, gamma, reg) and
/// v' = project_ball(v - tau h, r_v).
///
/// Hyperparameters are not validated here (run() does that). Throws
/// DivergenceError when a new iterate is non-finite or |y'| > kLowerNormCap.
StepResult hjfbio_step(const SolverState& state, const HyperParams& hp, const BilevelOracle& oracle,
                       const Regularizer& reg);

struct TraceOptions {
  bool lower_gap = false;
  bool lyapunov = false;
  bool exact_grad_map = false;
  bool wall_time = false;

  bool any_exact() const { return lower_gap || lyapunov || exact_grad_map; }
};

struct RunCallbacks {
  /// Header names of the values the row hook appends to TraceRow::extras.
  std::vector<std::string> extra_columns;
  /// Called once per row with the state the row describes.
  std::function<void(const SolverState&, TraceRow&)> on_row;
};

struct RunResult {
  std::vector<TraceRow> trace;
  Vector x_out;  // x_{t_out}, t_out uniform on 1..T
  long t_out = 0;
  Vector x_final;     // x_T
  Vector y_final;     // y_T
  SolverState after;  // (x_{T+1}, y_{T+1}, v_{T+1})
  std::uint64_t gradient_calls = 0;
  std::int64_t wall_time_ns = 0;
  /// Set when the run stopped early; the trace then holds the rows that
  /// completed.
  std::optional<std::string> divergence;

  bool ok() const { return !divergence.has_value(); }
};

/// Runs hp.iterations steps from `initial` (v projected onto the r_v ball
/// first). Optional exact columns need hp.mu, hp.l_g and the corresponding
/// oracle capabilities; requesting them otherwise throws Unsupported.
RunResult run(const BilevelOracle& oracle, const HyperParams& hp, const Regularizer& reg,
              SolverState initial, const TraceOptions& options = {},
              const RunCallbacks& callbacks = {});

/// Fills the optional exact columns of `row` for the state it describes.
void fill_exact_columns(const BilevelOracle& oracle, const HyperParams& hp, const Regularizer& reg,
                        const SolverState& state, const TraceOptions& options, TraceRow& row);

}  // namespace hjfbio
