#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "derivd/kb.hpp"
#include "derivd/metrics.hpp"
#include "derivd/policies.hpp"
#include "derivd/report.hpp"
#include "derivd/thermo.hpp"
#include "derivd/workload.hpp"

namespace derivd {

const char* version();

enum class ExperimentId { exp1, exp2, exp3, exp4 };
ExperimentId parse_experiment(std::string_view name);
std::string to_string(ExperimentId id);

struct KbSettings {
  std::size_t atoms = 2000;
  std::size_t rules = 6000;
  double depth = 5.0;
  std::size_t max_arity = 2;
  double base_fraction = 0.1;

  KbSpec to_spec(std::uint64_t seed) const;
};

/// Declarative experiment settings. defaults() reproduces the reference
/// setup for each experiment; a JSON config file overlays any subset.
struct ExperimentConfig {
  ExperimentId id = ExperimentId::exp1;
  std::uint64_t seed = 42;
  std::string output_dir;

  ThermoParams thermo;
  double c = 1.0;
  ContentMode content = ContentMode::structural;

  /// exp1: one entry per KB size. Others use the first entry as the baseline.
  std::vector<KbSettings> kbs;
  WorkloadSpec workload;
  std::vector<PolicyKind> policies;
  PolicyParams policy;

  double warmup_fraction = 0.1;
  double hit_latency = 1.0;
  double noise_floor = 1e-3;
  unsigned workers = 0;

  std::size_t queries_per_kb = 50;      // exp1
  std::vector<double> alphas;           // exp2, exp4
  std::vector<double> betas;            // exp2, exp4
  std::vector<std::size_t> cache_sizes; // exp3
  std::size_t seed_count = 1;           // exp3: seeds seed .. seed+seed_count-1
  std::vector<double> depths;           // exp4
  std::vector<std::size_t> entities;    // exp4

  static ExperimentConfig defaults(ExperimentId id);
  /// Overlays `j` on defaults for j["experiment"] (or `fallback` when absent).
  /// Unknown keys are rejected.
  static ExperimentConfig from_json(const nlohmann::ordered_json& j, ExperimentId fallback);
  static ExperimentConfig load(const std::filesystem::path& path, ExperimentId fallback);
  nlohmann::ordered_json to_json() const;
  void validate() const;
};

/// Evenly spaced grid lo, lo+step, ..., hi (hi included up to rounding).
std::vector<double> linear_grid(double lo, double hi, double step);

/// $DERIVD_OUT when set and non-empty, otherwise "results".
std::filesystem::path default_output_dir();

ExperimentReport exp1_duality(const ExperimentConfig& cfg);
ExperimentReport exp2_phase(const ExperimentConfig& cfg);
ExperimentReport exp3_baselines(const ExperimentConfig& cfg);
ExperimentReport exp4_sensitivity(const ExperimentConfig& cfg);
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Coefficient of determination of the least-squares line y ~ a + b x.
double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace derivd
