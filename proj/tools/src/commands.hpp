#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "hjfbio/verify.hpp"

namespace hjfbio::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Overrides output_dir when set; flags still win over it.
inline constexpr const char* kOutputDirEnv = "HJFBIO_OUTPUT_DIR";

/// Runs the solver and writes <output_dir>/<stem>.csv and
/// <output_dir>/<stem>.summary.json.
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);

struct BenchOptions {
  std::string which;  // plgame or matsense
  RunConfig base;
  int seeds = 3;
  int threads = 0;  // 0 selects min(seeds, hardware threads)
};

std::filesystem::path bench_trace_path(const RunConfig& config, const std::string& which, int seed);
std::filesystem::path bench_aggregate_path(const RunConfig& config, const std::string& which);

/// One trace per seed (seed = base.seed + k) plus an aggregate holding the
/// per-iteration mean of every column across seeds.
int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err);

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);

/// Writes the generated problem as a JSON snapshot.
int cmd_snapshot(const RunConfig& config, const std::filesystem::path& path, std::ostream& out,
                 std::ostream& err);

/// Full command line, args[0] being the program name.
int main_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hjfbio::cli
