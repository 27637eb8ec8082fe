#pragma once

// Landauer-limit energy accounting and the storage/computation cost formulas.
// Energies are joules, storage is bits unless a name says otherwise, and
// derivation costs are nats (depth * ln 2).

#include <cstdint>
#include <span>

namespace derivd {

class QueryDistribution;

struct ThermoParams {
  double k_b = 1.38e-23;   // J/K
  double temperature = 300.0;  // K
  double t_refresh = 1.0;  // s (simulator: steps)
  double t_avg = 1.0;      // s, mean query inter-arrival

  void validate() const;
  /// k_B T ln 2, the energy of one irreversible bit operation.
  double landauer_unit() const;
};

struct CostWeights {
  double w_energy = 0.0;
  double w_time = 0.0;
  double w_storage = 1.0;

  void validate() const;
};

struct CostBreakdown {
  double energy = 0.0;        // J
  double time = 0.0;          // steps
  double storage_bits = 0.0;  // bits
  double storage_term = 0.0;  // nats per access
  double compute_term = 0.0;  // nats per access
  double amortized = 0.0;     // storage_term + compute_term
};

double landauer_compute_energy(std::uint64_t depth, const ThermoParams& p);
double landauer_compute_energy(double steps, const ThermoParams& p);

/// bits * k_B T ln2 * (t / t_refresh).
double storage_maintenance_energy(double bits, double t, const ThermoParams& p);

struct CapacityBounds {
  double min_carrier_bits = 0.0;
  double max_mutual_info_bits = 0.0;
};

/// Carrier size and information bounds for an energy budget spent encoding
/// `ontology_states` equiprobable states.
CapacityBounds capacity_bounds(double ontology_states, double energy, const ThermoParams& p);

/// Energy k_B T ln(|O|/|C|) that exactly compresses |O| uniform states onto |C|.
double uniform_compression_energy(double ontology_states, double carrier_states, const ThermoParams& p);

/// storage / f_q + h_derive, with f_q the query's access probability.
double amortized_access_cost(double storage, double f_q, double h_derive);

/// Same cost with storage spread over the query's absolute access count.
double amortized_access_cost_by_count(double storage, double access_count, double h_derive);

struct MultiQueryCosts {
  double expected_h_derive = 0.0;
  double expected_correct = 0.0;
  double naive_invalid = 0.0;
  double ratio = 0.0;
};

/// Expected per-access cost when storage is amortized over all N accesses,
/// next to the naive average of single-query amortized costs.
MultiQueryCosts multi_query_costs(double storage_bits, std::uint64_t n_accesses, std::span<const double> probabilities,
                                  std::span<const double> h_derive);
MultiQueryCosts multi_query_costs(double storage_bits, std::uint64_t n_accesses, const QueryDistribution& dist,
                                  std::span<const double> h_derive);

/// Break-even access frequency 1 + 1/(c ln atom_count).
double critical_frequency(double atom_count, double c);

/// H(Q) / log2(E_budget / (H(Q|K) k_B T ln2)).
double critical_storage(double h_q_total_bits, double e_budget, double h_q_given_k_bits, const ThermoParams& p);

struct TrialityCheck {
  double product = 0.0;  // E * T / M
  double bound = 0.0;    // H(Q|K) * k_B T ln2
  bool satisfied = false;
  double margin() const { return product - bound; }
  bool operator==(const TrialityCheck&) const = default;
};

TrialityCheck triality_check(double energy, double time, double storage_bits, double h_q_given_k_bits,
                             const ThermoParams& p);

/// I(S;q) / T.
double entropy_production_min(double mutual_info_nats, const ThermoParams& p);

/// H(Q) / (E[Ld] ln 2).
double phase_alpha_critical(double h_q_bits, double mean_depth);

enum class GradientRegime { exponential, inverse_capacity };
GradientRegime phase_regime(double alpha, double alpha_critical);

double weighted_strategy_cost(double energy, double time, double storage_bits, const CostWeights& w);

/// Per-access costs in nats: storage spread over `accesses`, plus the mean
/// derivation entropy. Energy and time cover the whole run.
CostBreakdown cost_breakdown(double storage_bits, double compute_steps, double accesses, double duration,
                             const ThermoParams& p);

/// Frequency-weighted lower bound on amortized access cost (nats):
/// H_q (1 + 1/(c ln m) - 1/f_q) - c log2 m.
double duality_lower_bound(double h_q, double f_q, double atom_count, double c);

}  // namespace derivd
