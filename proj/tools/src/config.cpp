#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "hjfbio/errors.hpp"

namespace hjfbio::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

std::pair<std::string, std::string> split_entry(const std::string& line, int line_no) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key=value");
  }
  std::string key = trim(line.substr(0, eq));
  if (key.empty()) {
    throw InvalidArgument("config line " + std::to_string(line_no) + ": empty key");
  }
  return {std::move(key), trim(line.substr(eq + 1))};
}

double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw InvalidArgument("config: " + key + " expects a number, got '" + text + "'");
  }
  return value;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw InvalidArgument("config: " + key + " expects an integer, got '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw InvalidArgument("config: " + key + " expects true or false, got '" + text + "'");
}

std::optional<double> parse_optional(const std::string& key, const std::string& text) {
  if (text == "auto") return std::nullopt;
  return parse_double(key, text);
}

std::string show(const std::optional<double>& v) { return v ? format_double(*v) : "auto"; }
std::string show(bool b) { return b ? "true" : "false"; }

struct Field {
  const char* key;
  const char* help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define HJFBIO_DOUBLE(name, help)                                                             \
  Field {                                                                                     \
    #name, help, [](RunConfig& c, const std::string& v) { c.name = parse_double(#name, v); }, \
        [](const RunConfig& c) { return format_double(c.name); }                              \
  }
#define HJFBIO_OPTIONAL(name, help)                                                             \
  Field {                                                                                       \
    #name, help, [](RunConfig& c, const std::string& v) { c.name = parse_optional(#name, v); }, \
        [](const RunConfig& c) { return show(c.name); }                                         \
  }
#define HJFBIO_INDEX(name, help)                                                                  \
  Field {                                                                                         \
    #name, help, [](RunConfig& c, const std::string& v) { c.name = parse_int<Index>(#name, v); }, \
        [](const RunConfig& c) { return std::to_string(c.name); }                                 \
  }
#define HJFBIO_BOOL(name, help)                                                             \
  Field {                                                                                   \
    #name, help, [](RunConfig& c, const std::string& v) { c.name = parse_bool(#name, v); }, \
        [](const RunConfig& c) { return show(c.name); }                                     \
  }
#define HJFBIO_STRING(name, help)                                        \
  Field {                                                                \
    #name, help, [](RunConfig& c, const std::string& v) { c.name = v; }, \
        [](const RunConfig& c) { return c.name; }                        \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      HJFBIO_STRING(problem, "toy, plgame or matsense"),
      Field{
          "snapshot", "problem snapshot JSON to load instead of generating",
          [](RunConfig& c, const std::string& v) { c.snapshot = v == "none" ? "" : v; },
          [](const RunConfig& c) { return c.snapshot.empty() ? std::string("none") : c.snapshot; }},
      HJFBIO_INDEX(d, "dimension (plgame: x and y; matsense: rows of U)"),
      HJFBIO_INDEX(l, "plgame covariance rank"),
      HJFBIO_INDEX(n, "sample count (0: generator default)"),
      HJFBIO_INDEX(r, "matsense factor rank"),
      HJFBIO_DOUBLE(gen_mu, "plgame lower end of the covariance spectrum"),
      HJFBIO_DOUBLE(gen_L, "plgame upper end of the covariance spectrum"),
      HJFBIO_DOUBLE(init_scale, "matsense initial factor scale"),
      HJFBIO_BOOL(project_coupling, "plgame: restrict the lower coupling to range(Q)"),
      Field{
          "seed", "seed of the problem generator and the output index",
          [](RunConfig& c, const std::string& v) { c.seed = parse_int<std::uint64_t>("seed", v); },
          [](const RunConfig& c) { return std::to_string(c.seed); }},
      HJFBIO_DOUBLE(lambda, "lower-level step"),
      HJFBIO_DOUBLE(gamma, "upper-level step"),
      HJFBIO_DOUBLE(tau, "auxiliary-variable step"),
      HJFBIO_DOUBLE(delta_eps, "finite-difference step"),
      HJFBIO_OPTIONAL(r_v, "auxiliary-variable ball radius (auto: problem default)"),
      HJFBIO_OPTIONAL(r_h, "Hessian-vector estimate cap (auto: problem default)"),
      HJFBIO_OPTIONAL(mu, "lower clamp of the exact columns (auto: problem default)"),
      HJFBIO_OPTIONAL(l_g, "upper clamp of the exact columns (auto: problem default)"),
      Field{"T", "iteration count",
            [](RunConfig& c, const std::string& v) { c.T = parse_int<long>("T", v); },
            [](const RunConfig& c) { return std::to_string(c.T); }},
      HJFBIO_STRING(regularizer, "zero, box:lo:hi, l1:w or auto"),
      HJFBIO_BOOL(lower_gap, "emit the lower_gap column"),
      HJFBIO_BOOL(lyapunov, "emit the lyapunov column"),
      HJFBIO_BOOL(exact_grad_map, "emit the exact_grad_map_norm_sq column"),
      HJFBIO_BOOL(wall_time, "emit the wall_time_ns column (breaks byte-identical output)"),
      HJFBIO_STRING(output_dir, "directory for output files"),
      HJFBIO_STRING(name, "output file stem (default run_<problem>)"),
  };
  return table;
}

#undef HJFBIO_DOUBLE
#undef HJFBIO_OPTIONAL
#undef HJFBIO_INDEX
#undef HJFBIO_BOOL
#undef HJFBIO_STRING

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues out;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool trace_file = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line_no == 1 && line == kTraceMagic) {
      trace_file = true;
      continue;
    }
    if (starts_with(line, kConfigPrefix)) {
      out.push_back(
          split_entry(line.substr(std::char_traits<char>::length(kConfigPrefix)), line_no));
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    if (trace_file) break;  // CSV body
    out.push_back(split_entry(line, line_no));
  }
  return out;
}

KeyValues load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_key_values(buffer.str());
}

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const Field& f : fields()) {
    if (key == f.key) {
      f.set(*this, value);
      return;
    }
  }
  throw InvalidArgument("config: unknown key '" + key + "'");
}

void RunConfig::apply(const KeyValues& entries) {
  for (const auto& [key, value] : entries) set(key, value);
}

KeyValues RunConfig::to_key_values() const {
  KeyValues out;
  for (const Field& f : fields()) out.emplace_back(f.key, f.get(*this));
  return out;
}

std::string RunConfig::help(const std::string& key) {
  for (const Field& f : fields()) {
    if (key == f.key) return f.help;
  }
  return {};
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const Field& f : fields()) v.emplace_back(f.key);
    return v;
  }();
  return names;
}

std::string RunConfig::output_stem() const {
  if (!name.empty()) return name;
  return "run_" + (problem.empty() ? std::string("snapshot") : problem);
}

TraceOptions RunConfig::trace_options() const {
  TraceOptions o;
  o.lower_gap = lower_gap;
  o.lyapunov = lyapunov;
  o.exact_grad_map = exact_grad_map;
  o.wall_time = wall_time;
  return o;
}

ProblemInstance make_instance(const RunConfig& c) {
  if (!c.snapshot.empty()) {
    ProblemInstance inst = load_snapshot(c.snapshot);
    if (!c.problem.empty() && c.problem != inst.kind) {
      throw InvalidArgument("config: problem '" + c.problem + "' does not match snapshot kind '" +
                            inst.kind + "'");
    }
    return inst;
  }
  if (c.problem == "toy") return make_toy_instance();
  if (c.problem == "plgame") {
    PLGameParams p;
    p.d = c.d;
    p.l = c.l;
    p.n = c.n;
    p.mu = c.gen_mu;
    p.L = c.gen_L;
    p.seed = c.seed;
    p.project_coupling = c.project_coupling;
    return make_plgame_instance(p);
  }
  if (c.problem == "matsense") {
    MatrixSensingParams p;
    p.d = c.d;
    p.r = c.r;
    p.n = c.n;
    p.seed = c.seed;
    p.init_scale = c.init_scale;
    return make_matsense_instance(p);
  }
  if (c.problem.empty()) throw InvalidArgument("config: no problem given");
  throw InvalidArgument("config: unknown problem '" + c.problem +
                        "' (expected toy, plgame or matsense)");
}

HyperParams make_hyperparams(const RunConfig& c, const ProblemInstance& inst) {
  HyperParams hp = inst.suggested_hyperparams();
  hp.lambda = c.lambda;
  hp.gamma = c.gamma;
  hp.tau = c.tau;
  hp.delta_eps = c.delta_eps;
  if (c.r_v) hp.r_v = *c.r_v;
  if (c.r_h) {
    hp.r_h = *c.r_h;
  } else if (c.r_v && hp.l_g) {
    hp.r_h = *c.r_v * *hp.l_g;
  }
  if (c.mu) hp.mu = c.mu;
  if (c.l_g) hp.l_g = c.l_g;
  hp.iterations = c.T;
  hp.seed = c.seed;
  return hp;
}

Regularizer make_regularizer(const RunConfig& c, const ProblemInstance& inst) {
  if (c.regularizer == "auto") return inst.regularizer;
  return Regularizer::parse(c.regularizer, inst.oracle->upper_dim());
}

}  // namespace hjfbio::cli
