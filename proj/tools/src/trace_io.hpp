#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "hjfbio/solver.hpp"

namespace hjfbio::cli {

/// Column names in file order: the seven fixed metrics, enabled exact
/// columns, problem extras, gradient_calls and (optionally) wall_time_ns.
std::vector<std::string> trace_columns(const TraceOptions& options,
                                       const std::vector<std::string>& extras);

/// Values of one row in trace_columns order.
std::vector<double> row_values(const TraceRow& row, const TraceOptions& options);

/// Magic line, one `# config:` line per key, optional extra comment lines,
/// then the header and rows. Floats use 17 significant digits.
void write_trace_csv(std::ostream& out, const KeyValues& config,
                     const std::vector<std::string>& comments,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

std::string format_value(double value);

struct TraceTable {
  KeyValues config;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column; throws InvalidArgument when absent.
  std::size_t column(const std::string& name) const;
};

TraceTable read_trace_csv(const std::filesystem::path& path);

/// Text after the comment header, i.e. the CSV header line and rows.
std::string csv_body(const std::string& file_text);

/// JSON summary of a finished (or diverged) run.
std::string summary_json(const RunConfig& config, const RunResult& result,
                         const std::vector<std::string>& columns, const TraceOptions& options);

}  // namespace hjfbio::cli
