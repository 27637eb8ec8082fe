#include "derivd/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "derivd/metrics.hpp"

namespace derivd {

void ThermoParams::validate() const {
  if (!(k_b > 0.0 && temperature > 0.0 && t_refresh > 0.0 && t_avg > 0.0))
    throw std::invalid_argument("thermo parameters must be strictly positive");
}

double ThermoParams::landauer_unit() const { return k_b * temperature * kLn2; }

void CostWeights::validate() const {
  if (w_energy < 0.0 || w_time < 0.0 || w_storage < 0.0) throw std::invalid_argument("cost weights must be non-negative");
  if (w_energy == 0.0 && w_time == 0.0 && w_storage == 0.0)
    throw std::invalid_argument("at least one cost weight must be positive");
}

double landauer_compute_energy(std::uint64_t depth, const ThermoParams& p) {
  return landauer_compute_energy(static_cast<double>(depth), p);
}

double landauer_compute_energy(double steps, const ThermoParams& p) {
  if (steps < 0.0) throw std::invalid_argument("negative step count");
  return steps * p.landauer_unit();
}

double storage_maintenance_energy(double bits, double t, const ThermoParams& p) {
  if (!(p.t_refresh > 0.0)) throw std::invalid_argument("t_refresh must be positive");
  if (bits < 0.0 || t < 0.0) throw std::invalid_argument("bits and t must be non-negative");
  return bits * p.landauer_unit() * (t / p.t_refresh);
}

CapacityBounds capacity_bounds(double ontology_states, double energy, const ThermoParams& p) {
  if (!(ontology_states >= 1.0)) throw std::invalid_argument("ontology_states must be at least 1");
  if (energy < 0.0) throw std::invalid_argument("energy must be non-negative");
  const double budget_bits = energy / p.landauer_unit();
  return {std::max(0.0, std::log2(ontology_states) - budget_bits), budget_bits};
}

double uniform_compression_energy(double ontology_states, double carrier_states, const ThermoParams& p) {
  if (!(carrier_states >= 1.0 && ontology_states >= carrier_states))
    throw std::invalid_argument("need 1 <= carrier_states <= ontology_states");
  return p.k_b * p.temperature * std::log(ontology_states / carrier_states);
}

double amortized_access_cost(double storage, double f_q, double h_derive) {
  if (!(f_q > 0.0)) throw std::invalid_argument("access frequency must be positive");
  return storage / f_q + h_derive;
}

double amortized_access_cost_by_count(double storage, double access_count, double h_derive) {
  if (!(access_count > 0.0)) throw std::invalid_argument("access count must be positive");
  return storage / access_count + h_derive;
}

MultiQueryCosts multi_query_costs(double storage_bits, std::uint64_t n_accesses, std::span<const double> probabilities,
                                  std::span<const double> h_derive) {
  if (n_accesses < 1) throw std::invalid_argument("n_accesses must be at least 1");
  if (probabilities.size() != h_derive.size()) throw std::invalid_argument("probability/cost size mismatch");
  MultiQueryCosts out;
  for (std::size_t i = 0; i < probabilities.size(); ++i) out.expected_h_derive += probabilities[i] * h_derive[i];
  out.expected_correct = storage_bits / static_cast<double>(n_accesses) + out.expected_h_derive;
  out.naive_invalid = storage_bits * static_cast<double>(probabilities.size()) + out.expected_h_derive;
  out.ratio = out.expected_correct > 0.0 ? out.naive_invalid / out.expected_correct : 1.0;
  return out;
}

MultiQueryCosts multi_query_costs(double storage_bits, std::uint64_t n_accesses, const QueryDistribution& dist,
                                  std::span<const double> h_derive) {
  return multi_query_costs(storage_bits, n_accesses, dist.weights(), h_derive);
}

double critical_frequency(double atom_count, double c) {
  if (!(atom_count >= 2.0)) throw std::invalid_argument("atom_count must be at least 2");
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  return 1.0 + 1.0 / (c * std::log(atom_count));
}

double critical_storage(double h_q_total_bits, double e_budget, double h_q_given_k_bits, const ThermoParams& p) {
  if (!(h_q_total_bits > 0.0 && e_budget > 0.0 && h_q_given_k_bits > 0.0))
    throw std::invalid_argument("critical storage inputs must be positive");
  const double ratio = e_budget / (h_q_given_k_bits * p.landauer_unit());
  if (!(ratio > 1.0)) throw std::domain_error("energy budget does not exceed the maintenance floor");
  return h_q_total_bits / std::log2(ratio);
}

TrialityCheck triality_check(double energy, double time, double storage_bits, double h_q_given_k_bits,
                             const ThermoParams& p) {
  if (!(storage_bits > 0.0)) throw std::invalid_argument("triality check needs positive storage");
  TrialityCheck out;
  out.product = energy * time / storage_bits;
  out.bound = h_q_given_k_bits * p.landauer_unit();
  out.satisfied = out.product >= out.bound;
  return out;
}

double entropy_production_min(double mutual_info_nats, const ThermoParams& p) {
  if (mutual_info_nats < 0.0) throw std::invalid_argument("mutual information must be non-negative");
  return mutual_info_nats / p.temperature;
}

double phase_alpha_critical(double h_q_bits, double mean_depth) {
  if (!(mean_depth > 0.0)) throw std::invalid_argument("mean depth must be positive");
  return h_q_bits / (mean_depth * kLn2);
}

GradientRegime phase_regime(double alpha, double alpha_critical) {
  return alpha < alpha_critical ? GradientRegime::exponential : GradientRegime::inverse_capacity;
}

double weighted_strategy_cost(double energy, double time, double storage_bits, const CostWeights& w) {
  if (energy < 0.0 || time < 0.0 || storage_bits < 0.0) throw std::invalid_argument("cost inputs must be non-negative");
  return w.w_energy * energy + w.w_time * time + w.w_storage * storage_bits;
}

CostBreakdown cost_breakdown(double storage_bits, double compute_steps, double accesses, double duration,
                             const ThermoParams& p) {
  if (!(accesses > 0.0)) throw std::invalid_argument("accesses must be positive");
  CostBreakdown b;
  b.storage_bits = storage_bits;
  b.time = duration;
  b.energy = landauer_compute_energy(compute_steps, p) + storage_maintenance_energy(storage_bits, duration, p);
  b.storage_term = to_nats(storage_bits) / accesses;
  b.compute_term = compute_steps * kLn2 / accesses;
  b.amortized = b.storage_term + b.compute_term;
  return b;
}

double duality_lower_bound(double h_q, double f_q, double atom_count, double c) {
  if (!(f_q > 0.0)) throw std::invalid_argument("access frequency must be positive");
  if (!(atom_count >= 2.0)) throw std::invalid_argument("atom_count must be at least 2");
  return h_q * (1.0 + 1.0 / (c * std::log(atom_count)) - 1.0 / f_q) - c * std::log2(atom_count);
}

}  // namespace derivd
