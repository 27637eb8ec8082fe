#pragma once

// Named formula calculators behind `derivd calc <sub>`.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace derivd {

struct CalcUsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CalcArg {
  std::string name;  // flag without leading dashes
  std::string default_value;
  std::string unit;
  std::string help;
};

struct CalcSpec {
  std::string name;
  std::string formula;
  std::vector<CalcArg> args;
};

struct CalcValue {
  std::string name;
  double value = 0.0;
  std::string unit;
};

struct CalcRecord {
  std::string sub;
  std::string formula;
  std::vector<CalcValue> inputs;
  std::vector<CalcValue> outputs;

  const CalcValue& output(const std::string& name) const;
};

const std::vector<CalcSpec>& calc_specs();
const CalcSpec& calc_spec(const std::string& sub);

/// Missing args take their defaults. List-valued args are comma separated.
/// Throws CalcUsageError for an unknown sub, an unknown arg or a malformed
/// number, and lets domain errors from the formulas propagate.
CalcRecord run_calc(const std::string& sub, const std::map<std::string, std::string>& args);

/// Multi-line text: inputs, formula and results, each with units.
std::string format_calc(const CalcRecord& record);

}  // namespace derivd
