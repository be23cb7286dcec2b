#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <thread>

#include "hjfbio/errors.hpp"
#include "hjfbio/instance.hpp"
#include "hjfbio/solver.hpp"
#include "trace_io.hpp"

namespace hjfbio::cli {

namespace fs = std::filesystem;

namespace {

struct RunOutput {
  RunConfig config;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  RunResult result;
  TraceOptions options;
};

RunOutput execute(const RunConfig& config) {
  const ProblemInstance inst = make_instance(config);
  const HyperParams hp = make_hyperparams(config, inst);
  const Regularizer reg = make_regularizer(config, inst);
  RunOutput o;
  o.config = config;
  o.options = config.trace_options();
  o.result = run(*inst.oracle, hp, reg, inst.initial, o.options, inst.callbacks);
  o.columns = trace_columns(o.options, inst.callbacks.extra_columns);
  o.rows.reserve(o.result.trace.size());
  for (const TraceRow& row : o.result.trace) o.rows.push_back(row_values(row, o.options));
  return o;
}

std::vector<std::string> divergence_comments(const RunResult& result) {
  if (!result.divergence) return {};
  return {"divergence: " + *result.divergence};
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot open '" + path.string() + "' for writing");
  file << text;
  if (!file) throw Error("write to '" + path.string() + "' failed");
}

std::string trace_text(const RunOutput& o, const std::vector<std::string>& extra_comments = {}) {
  std::ostringstream text;
  std::vector<std::string> comments = divergence_comments(o.result);
  comments.insert(comments.end(), extra_comments.begin(), extra_comments.end());
  write_trace_csv(text, o.config.to_key_values(), comments, o.columns, o.rows);
  return text.str();
}

std::string vector_text(const Vector& v) {
  std::string s = "[";
  for (Index i = 0; i < v.size(); ++i) {
    if (i == 6 && v.size() > 8) {
      s += ", ... (" + std::to_string(v.size()) + " entries)";
      break;
    }
    s += (i ? ", " : "") + format_value(v(i));
  }
  return s + "]";
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const RunOutput o = execute(config);
  const fs::path dir(config.output_dir);
  const fs::path csv = dir / (config.output_stem() + ".csv");
  const fs::path summary = dir / (config.output_stem() + ".summary.json");
  write_file(csv, trace_text(o));
  write_file(summary, summary_json(config, o.result, o.columns, o.options) + "\n");

  out << "trace:   " << csv.string() << " (" << o.rows.size() << " rows)\n"
      << "summary: " << summary.string() << '\n'
      << "gradient calls: " << o.result.gradient_calls << '\n'
      << "x_final: " << vector_text(o.result.x_final) << '\n'
      << "y_final: " << vector_text(o.result.y_final) << '\n';
  if (!o.result.ok()) {
    err << "run stopped early: " << *o.result.divergence << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

fs::path bench_trace_path(const RunConfig& config, const std::string& which, int seed) {
  return fs::path(config.output_dir) / ("bench_" + which + "_d" + std::to_string(config.d) +
                                        "_seed" + std::to_string(seed) + ".csv");
}

fs::path bench_aggregate_path(const RunConfig& config, const std::string& which) {
  return fs::path(config.output_dir) /
         ("bench_" + which + "_d" + std::to_string(config.d) + "_aggregate.csv");
}

int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err) {
  if (options.which != "plgame" && options.which != "matsense") {
    throw InvalidArgument("bench: unknown benchmark '" + options.which +
                          "' (expected plgame or matsense)");
  }
  if (options.seeds < 1) throw InvalidArgument("bench: --seeds must be at least 1");
  if (!options.base.snapshot.empty()) {
    throw InvalidArgument("bench: snapshots are not supported, the seeds generate the problems");
  }

  std::vector<RunConfig> configs(static_cast<std::size_t>(options.seeds), options.base);
  for (int k = 0; k < options.seeds; ++k) {
    configs[k].problem = options.which;
    configs[k].seed = options.base.seed + static_cast<std::uint64_t>(k);
    configs[k].name = bench_trace_path(configs[k], options.which, static_cast<int>(configs[k].seed))
                          .stem()
                          .string();
  }

  // Each seed owns its RNG streams and trace buffer; files are written after
  // every worker has finished.
  std::vector<RunOutput> outputs(configs.size());
  std::vector<std::string> errors(configs.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int threads = options.threads > 0 ? options.threads
                                          : static_cast<int>(std::min<unsigned>(hw, options.seeds));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        outputs[i] = execute(configs[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) {
      throw InvalidArgument("bench seed " + std::to_string(configs[i].seed) + ": " + errors[i]);
    }
  }

  int status = kExitOk;
  std::size_t common = outputs.front().rows.size();
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const fs::path path =
        bench_trace_path(configs[i], options.which, static_cast<int>(configs[i].seed));
    write_file(path, trace_text(outputs[i]));
    out << "trace: " << path.string() << " (" << outputs[i].rows.size() << " rows)\n";
    if (!outputs[i].result.ok()) {
      err << "seed " << configs[i].seed << " stopped early: " << *outputs[i].result.divergence
          << '\n';
      status = kExitFailure;
    }
    common = std::min(common, outputs[i].rows.size());
  }

  const std::vector<std::string>& columns = outputs.front().columns;
  std::vector<std::vector<double>> mean(common, std::vector<double>(columns.size(), 0.0));
  for (const RunOutput& o : outputs) {
    for (std::size_t t = 0; t < common; ++t) {
      for (std::size_t c = 0; c < columns.size(); ++c) mean[t][c] += o.rows[t][c];
    }
  }
  for (auto& row : mean) {
    for (double& v : row) v /= static_cast<double>(outputs.size());
  }
  RunConfig agg_config = options.base;
  agg_config.problem = options.which;
  agg_config.name = bench_aggregate_path(agg_config, options.which).stem().string();
  std::ostringstream text;
  write_trace_csv(text, agg_config.to_key_values(),
                  {"aggregate: per-iteration mean over seeds " + std::to_string(options.base.seed) +
                   ".." + std::to_string(options.base.seed + options.seeds - 1)},
                  columns, mean);
  const fs::path agg = bench_aggregate_path(agg_config, options.which);
  write_file(agg, text.str());
  out << "aggregate: " << agg.string() << " (" << common << " rows)\n";
  return status;
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& /*err*/) {
  const std::vector<CheckResult> results = run_verification(options);
  std::size_t width = 5;
  for (const auto& r : results) width = std::max(width, r.name.size());
  int failed = 0;
  char line[512];
  std::snprintf(line, sizeof(line), "%-*s  %-23s  %-2s  %-12s  %s\n", static_cast<int>(width),
                "check", "observed", "", "bound", "result");
  out << line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof(line), "%-*s  %-23.17g  %-2s  %-12.6g  %s", static_cast<int>(width),
                  r.name.c_str(), r.observed, r.relation.c_str(), r.bound,
                  r.passed ? "PASS" : "FAIL");
    out << line;
    if (!r.detail.empty()) out << "  " << r.detail;
    out << '\n';
    if (!r.passed) ++failed;
  }
  out << (results.size() - failed) << "/" << results.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitFailure;
}

int cmd_snapshot(const RunConfig& config, const fs::path& path, std::ostream& out,
                 std::ostream& /*err*/) {
  const ProblemInstance inst = make_instance(config);
  save_snapshot(inst, path);
  out << "snapshot: " << path.string() << " (" << inst.kind << ")\n";
  return kExitOk;
}

namespace {

std::string flag_for(const std::string& key) {
  std::string flag = "--" + key;
  std::replace(flag.begin(), flag.end(), '_', '-');
  return flag;
}

/// Registers one string option per config key; only flags actually given
/// override the config file.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "Flat key=value config file (a trace CSV works too)");
    for (const std::string& key : RunConfig::keys()) {
      options[key] = app.add_option(flag_for(key), values[key], RunConfig::help(key));
    }
  }

  RunConfig resolve() const {
    RunConfig c;
    if (!config_file.empty()) c.apply(load_key_values(config_file));
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
      c.output_dir = dir;
    }
    for (const std::string& key : RunConfig::keys()) {
      if (options.at(key)->count() > 0) c.set(key, values.at(key));
    }
    return c;
  }
};

void require_problem(const RunConfig& c) {
  if (c.problem.empty() && c.snapshot.empty()) {
    throw CLI::RequiredError("--problem (or --snapshot, or a --config providing one)");
  }
}

}  // namespace

int main_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hessian/Jacobian-free bilevel optimization solver and benchmarks", "hjfbio"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hjfbio 0.1.0");

  ConfigFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "Run the solver on one problem");
  run_flags.attach(*run_cmd);

  ConfigFlags bench_flags;
  BenchOptions bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run a benchmark across seeds");
  bench_cmd->add_option("which", bench.which, "plgame or matsense")->required();
  bench_cmd->add_option("--seeds", bench.seeds, "Number of seeds");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (0: automatic)");
  bench_flags.attach(*bench_cmd);

  VerifyOptions verify;
  std::string level = "quick";
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run the verification checks");
  verify_cmd->add_option("--level", level, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));
  verify_cmd->add_option("--delta-eps", verify.delta_eps, "Finite-difference step under test");
  verify_cmd->add_option("--seed", verify.seed, "Seed of the random check points");

  ConfigFlags snap_flags;
  std::string snap_out;
  CLI::App* snap_cmd = app.add_subcommand("snapshot", "Write a generated problem as JSON");
  snap_cmd->add_option("--out", snap_out,
                       "Output file (default <output-dir>/<problem>_snapshot.json)");
  snap_flags.attach(*snap_cmd);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (*run_cmd) {
      const RunConfig c = run_flags.resolve();
      require_problem(c);
      return cmd_run(c, out, err);
    }
    if (*bench_cmd) {
      bench.base = bench_flags.resolve();
      return cmd_bench(bench, out, err);
    }
    if (*verify_cmd) {
      verify.level = level == "full" ? VerifyLevel::kFull : VerifyLevel::kQuick;
      return cmd_verify(verify, out, err);
    }
    if (*snap_cmd) {
      const RunConfig c = snap_flags.resolve();
      require_problem(c);
      const fs::path path = snap_out.empty()
                                ? fs::path(c.output_dir) / (c.problem + "_snapshot.json")
                                : fs::path(snap_out);
      return cmd_snapshot(c, path, out, err);
    }
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n'
        << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace hjfbio::cli
