#include <filesystem>
#include <fstream>
#include <sstream>

#include "derivd/report.hpp"
#include "doctest.h"

using namespace derivd;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("derivd_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

ExperimentReport sample() {
  ExperimentReport r;
  r.experiment = "demo";
  r.columns = {"name", "count", "value", "note"};
  r.add_row({std::string("a,b"), std::int64_t{3}, 0.1, std::monostate{}});
  r.add_row({std::string("say \"hi\""), std::int64_t{-2}, 1e-300, std::string("x")});
  r.metadata["seed"] = 7;
  return r;
}

}  // namespace

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(2.5e-21) == "2.5e-21");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("csv rendering") {
  const auto r = sample();
  CHECK(to_csv(r) == "name,count,value,note\n\"a,b\",3,0.1,\n\"say \"\"hi\"\"\",-2,1e-300,x\n");
  ExperimentReport empty;
  empty.experiment = "empty";
  empty.columns = {"a", "b"};
  CHECK(to_csv(empty) == "a,b\n");
}

TEST_CASE("row width and column lookup") {
  auto r = sample();
  CHECK_THROWS_AS(r.add_row({std::int64_t{1}}), std::invalid_argument);
  CHECK(r.column_index("value") == 2);
  CHECK_THROWS(r.column_index("missing"));
  CHECK(r.number(0, "count") == 3.0);
  CHECK(r.number(1, "value") == 1e-300);
  CHECK(std::get<std::string>(r.at(1, "note")) == "x");
}

TEST_CASE("json round-trips the row set") {
  const auto r = sample();
  const auto j = to_json(r);
  CHECK(j["experiment"] == "demo");
  CHECK(j["rows"].size() == 2);
  CHECK(j["rows"][0]["note"].is_null());
  const auto back = report_from_json(j);
  CHECK(back.columns == r.columns);
  CHECK(back.rows == r.rows);
  CHECK(to_csv(back) == to_csv(r));
}

TEST_CASE("emit_report writes byte-identical files on rerun") {
  const auto dir = scratch("emit");
  const auto r = sample();
  const auto first = emit_report(r, dir / "nested");
  CHECK(first.csv.filename() == "demo.csv");
  CHECK(first.json.filename() == "demo.json");
  const std::string csv = slurp(first.csv), js = slurp(first.json);
  emit_report(r, dir / "nested");
  CHECK(slurp(first.csv) == csv);
  CHECK(slurp(first.json) == js);
  CHECK(read_report_json(first.json).rows == r.rows);
  std::filesystem::remove_all(dir);
}

TEST_CASE("emit_report names the failing path") {
  const auto dir = scratch("blocked");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  try {
    emit_report(sample(), dir / "file" / "sub");
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("file") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}
