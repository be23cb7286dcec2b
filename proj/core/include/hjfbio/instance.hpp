#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "hjfbio/constants.hpp"
#include "hjfbio/matrix_sensing.hpp"
#include "hjfbio/pl_game.hpp"
#include "hjfbio/problem.hpp"
#include "hjfbio/regularizer.hpp"
#include "hjfbio/solver.hpp"

namespace hjfbio {

/// A ready-to-run benchmark problem: its data, oracle, default regularizer,
/// initial point and the hyperparameters it suggests.
struct ProblemInstance {
  std::string kind;  // "toy", "plgame" or "matsense"
  std::shared_ptr<const PLGameProblem> plgame;
  std::shared_ptr<const MatrixSensingProblem> matsense;
  std::shared_ptr<const BilevelOracle> oracle;

  SolverState initial;
  Regularizer regularizer;
  std::optional<SmoothnessConstants> constants;
  std::optional<double> mu;
  std::optional<double> l_g;
  double r_v = 10.0;
  double r_h = 100.0;
  RunCallbacks callbacks;

  /// Default hyperparameters with this instance's suggestions filled in.
  HyperParams suggested_hyperparams() const;
};

ProblemInstance make_toy_instance();
ProblemInstance make_plgame_instance(const PLGameParams& params);
ProblemInstance make_plgame_instance(PLGameProblem problem);
ProblemInstance make_matsense_instance(const MatrixSensingParams& params);
ProblemInstance make_matsense_instance(MatrixSensingProblem problem);

/// Versioned JSON snapshot of the generated data (format "hjfbio-problem",
/// version 1). Matrices are stored as {"rows", "cols", "data"} with data in
/// row-major order; generation parameters and the seed are recorded so the
/// instance can also be regenerated.
std::string snapshot_json(const ProblemInstance& instance);
ProblemInstance instance_from_snapshot_json(const std::string& text);

void save_snapshot(const ProblemInstance& instance, const std::filesystem::path& path);
ProblemInstance load_snapshot(const std::filesystem::path& path);

inline constexpr int kSnapshotVersion = 1;

}  // namespace hjfbio
