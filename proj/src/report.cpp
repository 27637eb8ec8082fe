#include "derivd/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace derivd {

void ExperimentReport::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("report " + experiment + ": row has " + std::to_string(row.size()) +
                                " cells, expected " + std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::size_t ExperimentReport::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::out_of_range("report " + experiment + " has no column '" + name + "'");
}

const Cell& ExperimentReport::at(std::size_t row, const std::string& column) const {
  return rows.at(row).at(column_index(column));
}

double ExperimentReport::number(std::size_t row, const std::string& column) const {
  const Cell& c = at(row, column);
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  throw std::invalid_argument("column '" + column + "' is not numeric");
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

nlohmann::ordered_json cell_json(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return *i;
  if (const auto* d = std::get_if<double>(&cell)) {
    if (!std::isfinite(*d)) return format_number(*d);
    return *d;
  }
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  return nullptr;
}

Cell json_cell(const nlohmann::ordered_json& v) {
  if (v.is_null()) return std::monostate{};
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number()) return v.get<double>();
  if (v.is_boolean()) return static_cast<std::int64_t>(v.get<bool>());
  return v.get<std::string>();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::string format_cell(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  if (const auto* s = std::get_if<std::string>(&cell)) return csv_escape(*s);
  return "";
}

std::string to_csv(const ExperimentReport& report) {
  std::string out;
  for (std::size_t i = 0; i < report.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(report.columns[i]);
  }
  out += '\n';
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json to_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["experiment"] = report.experiment;
  j["metadata"] = report.metadata;
  j["columns"] = report.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[report.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

ExperimentReport report_from_json(const nlohmann::ordered_json& j) {
  ExperimentReport r;
  r.experiment = j.at("experiment").get<std::string>();
  r.metadata = j.at("metadata");
  r.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& row : j.at("rows")) {
    std::vector<Cell> cells;
    for (const auto& col : r.columns) cells.push_back(json_cell(row.at(col)));
    r.add_row(std::move(cells));
  }
  return r;
}

ReportPaths emit_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  if (report.experiment.empty()) throw std::invalid_argument("report has no experiment name");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  ReportPaths paths{dir / (report.experiment + ".csv"), dir / (report.experiment + ".json")};
  write_file(paths.csv, to_csv(report));
  write_file(paths.json, to_json(report).dump(2) + "\n");
  return paths;
}

ExperimentReport read_report_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return report_from_json(nlohmann::ordered_json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace derivd
