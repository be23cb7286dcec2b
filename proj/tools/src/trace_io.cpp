#include "trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "hjfbio/errors.hpp"

namespace hjfbio::cli {

std::vector<std::string> trace_columns(const TraceOptions& options,
                                       const std::vector<std::string>& extras) {
  std::vector<std::string> cols = {
      "t",    "grad_map_norm_sq", "surrogate_norm", "lower_grad_norm", "v_residual_norm", "f_val",
      "g_val"};
  if (options.lower_gap) cols.emplace_back("lower_gap");
  if (options.lyapunov) cols.emplace_back("lyapunov");
  if (options.exact_grad_map) cols.emplace_back("exact_grad_map_norm_sq");
  cols.insert(cols.end(), extras.begin(), extras.end());
  cols.emplace_back("gradient_calls");
  if (options.wall_time) cols.emplace_back("wall_time_ns");
  return cols;
}

std::vector<double> row_values(const TraceRow& row, const TraceOptions& options) {
  std::vector<double> v = {static_cast<double>(row.t),
                           row.grad_map_norm_sq,
                           row.surrogate_norm,
                           row.lower_grad_norm,
                           row.v_residual_norm,
                           row.f_val,
                           row.g_val};
  const double missing = std::nan("");
  if (options.lower_gap) v.push_back(row.lower_gap.value_or(missing));
  if (options.lyapunov) v.push_back(row.lyapunov.value_or(missing));
  if (options.exact_grad_map) v.push_back(row.exact_grad_map_norm_sq.value_or(missing));
  v.insert(v.end(), row.extras.begin(), row.extras.end());
  v.push_back(static_cast<double>(row.gradient_calls));
  if (options.wall_time) v.push_back(static_cast<double>(row.wall_time_ns.value_or(0)));
  return v;
}

std::string format_value(double value) {
  // Integral values (t, call counts, nanoseconds) print without exponent.
  if (std::isfinite(value) && value == std::floor(value) && std::abs(value) < 9.007e15) {
    return std::to_string(static_cast<long long>(value));
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_trace_csv(std::ostream& out, const KeyValues& config,
                     const std::vector<std::string>& comments,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
  out << kTraceMagic << '\n';
  for (const auto& [key, value] : config) out << kConfigPrefix << key << '=' << value << '\n';
  for (const auto& c : comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_value(row[i]);
    out << '\n';
  }
}

std::size_t TraceTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw InvalidArgument("trace has no column '" + name + "'");
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

TraceTable read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open trace '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  TraceTable table;
  table.config = parse_key_values(text);
  std::istringstream body(csv_body(text));
  std::string line;
  if (!std::getline(body, line)) return table;
  table.columns = split_csv(line);
  while (std::getline(body, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const std::string& cell : split_csv(line))
      row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != table.columns.size()) {
      throw InvalidArgument("trace '" + path.string() + "': ragged row");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string csv_body(const std::string& text) {
  std::size_t pos = 0;
  while (pos < text.size() && text[pos] == '#') {
    const auto nl = text.find('\n', pos);
    if (nl == std::string::npos) return {};
    pos = nl + 1;
  }
  return text.substr(pos);
}

std::string summary_json(const RunConfig& config, const RunResult& result,
                         const std::vector<std::string>& columns, const TraceOptions& options) {
  using nlohmann::json;
  auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  json doc;
  doc["format"] = "hjfbio-summary";
  doc["version"] = 1;
  json cfg = json::object();
  for (const auto& [k, v] : config.to_key_values()) cfg[k] = v;
  doc["config"] = std::move(cfg);
  doc["iterations_completed"] = result.trace.size();
  doc["gradient_calls"] = result.gradient_calls;
  doc["wall_time_ns"] = result.wall_time_ns;
  doc["divergence"] = result.divergence ? json(*result.divergence) : json(nullptr);
  if (!result.trace.empty()) {
    const std::vector<double> last = row_values(result.trace.back(), options);
    json fin = json::object();
    for (std::size_t i = 0; i < columns.size(); ++i) {
      // JSON has no NaN; absent values become null.
      fin[columns[i]] = std::isfinite(last[i]) ? json(last[i]) : json(nullptr);
    }
    doc["final"] = std::move(fin);
    doc["t_out"] = result.t_out;
    doc["x_out"] = vec(result.x_out);
    doc["x_final"] = vec(result.x_final);
    doc["y_final"] = vec(result.y_final);
  }
  return doc.dump(2);
}

}  // namespace hjfbio::cli
