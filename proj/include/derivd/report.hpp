#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace derivd {

/// One CSV/JSON cell. monostate renders as an empty CSV field and JSON null.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct ExperimentReport {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  /// Config echo, version, seed and experiment-level summaries.
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();

  /// Throws std::invalid_argument when the row width differs from columns.
  void add_row(std::vector<Cell> row);
  std::size_t column_index(const std::string& name) const;
  const Cell& at(std::size_t row, const std::string& column) const;
  double number(std::size_t row, const std::string& column) const;
};

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);
std::string format_cell(const Cell& cell);

std::string to_csv(const ExperimentReport& report);
nlohmann::ordered_json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::ordered_json& j);

struct ReportPaths {
  std::filesystem::path csv;
  std::filesystem::path json;
};

/// Writes <dir>/<experiment>.csv and .json, creating dir if needed. Throws
/// std::runtime_error naming the path on I/O failure.
ReportPaths emit_report(const ExperimentReport& report, const std::filesystem::path& dir);

ExperimentReport read_report_json(const std::filesystem::path& path);

}  // namespace derivd
