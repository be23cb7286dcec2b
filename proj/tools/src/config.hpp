#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hjfbio/instance.hpp"
#include "hjfbio/solver.hpp"

namespace hjfbio::cli {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// First line of every trace CSV.
inline constexpr const char* kTraceMagic = "# hjfbio-trace v1";
/// Prefix of the config lines embedded in output headers.
inline constexpr const char* kConfigPrefix = "# config: ";

/// Parses flat `key = value` text. Blank lines and `#` comments are skipped,
/// except `# config: key=value` lines, which are read as entries so a trace
/// CSV can be fed back as a config file. Parsing stops at the first
/// non-comment line of a file that starts with the trace magic.
KeyValues parse_key_values(const std::string& text);
KeyValues load_key_values(const std::filesystem::path& path);

/// Everything needed to reproduce a run. Optional numeric fields print as
/// "auto" and fall back to the problem's suggestion.
struct RunConfig {
  std::string problem;   // toy, plgame, matsense; empty when unset
  std::string snapshot;  // problem snapshot to load instead of generating
  Index d = 20;
  Index l = 10;
  Index n = 0;  // 0 selects the generator default
  Index r = 3;
  double gen_mu = 0.1;
  double gen_L = 1.0;
  double init_scale = 1e-2;
  bool project_coupling = false;
  std::uint64_t seed = 0;

  double lambda = 0.01;
  double gamma = 0.01;
  double tau = 0.01;
  double delta_eps = 1e-5;
  std::optional<double> r_v;
  std::optional<double> r_h;
  std::optional<double> mu;
  std::optional<double> l_g;
  long T = 1000;
  std::string regularizer = "auto";

  bool lower_gap = false;
  bool lyapunov = false;
  bool exact_grad_map = false;
  bool wall_time = false;

  std::string output_dir = ".";
  std::string name;  // output file stem; empty selects "run_<problem>"

  /// Assigns one key. Throws InvalidArgument for unknown keys and values
  /// that do not parse.
  void set(const std::string& key, const std::string& value);
  void apply(const KeyValues& entries);
  /// Every key in a fixed order, values in a form set() reads back.
  KeyValues to_key_values() const;

  static const std::vector<std::string>& keys();
  static std::string help(const std::string& key);

  std::string output_stem() const;
  TraceOptions trace_options() const;
};

/// The problem instance a config describes (generated or loaded).
ProblemInstance make_instance(const RunConfig& config);

/// Config hyperparameters with unset fields taken from the instance.
HyperParams make_hyperparams(const RunConfig& config, const ProblemInstance& instance);

Regularizer make_regularizer(const RunConfig& config, const ProblemInstance& instance);

/// Shortest round-trip text of a double.
std::string format_double(double value);

}  // namespace hjfbio::cli
