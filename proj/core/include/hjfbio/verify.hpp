#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hjfbio {

enum class VerifyLevel { kQuick, kFull };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::kQuick;
  /// Step used by the estimator checks that run at "the configured" delta.
  double delta_eps = 1e-5;
  std::uint64_t seed = 0;
};

/// One line of the verification table. `observed` is compared against
/// `bound` with `relation` ("<=" or ">=").
struct CheckResult {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  std::string relation = "<=";
  bool passed = false;
  std::string detail;
};

/// Runs every check (never stops at the first failure). Quick level uses
/// the toy problem and d = 10 instances; full level adds larger sizes,
/// more sample points and longer runs.
std::vector<CheckResult> run_verification(const VerifyOptions& options);

}  // namespace hjfbio
