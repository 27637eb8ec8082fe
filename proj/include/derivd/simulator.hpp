#pragma once

// Stream simulation of a cache or static storage plan against a query
// workload, with latency, compute and Landauer energy accounting.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "derivd/kb.hpp"
#include "derivd/metrics.hpp"
#include "derivd/policies.hpp"
#include "derivd/thermo.hpp"
#include "derivd/workload.hpp"

namespace derivd {

/// Everything a run needs that does not depend on the policy: the profiled
/// query set, its distribution and one sampled stream. Read-only once built
/// and shareable across sweep workers. The knowledge base must outlive it.
struct Scenario {
  const KnowledgeBase* kb = nullptr;
  InfoModel model;
  WorkloadSpec workload;
  QueryDistribution dist;
  std::vector<QueryProfile> profiles;  // profiles[i].query.id == i
  std::vector<QueryId> stream;

  std::size_t query_count() const { return profiles.size(); }
  /// Sum of f_q * depth_q.
  double expected_depth() const;
  /// Sum of f_q * H_q in bits.
  double expected_content_bits() const;
};

/// Samples workload.query_count queries from the KB (seeded by workload.seed)
/// and a stream of workload.stream_length accesses.
Scenario make_scenario(const KnowledgeBase& kb, const WorkloadSpec& workload, const InfoModel& model);
/// Same, over a caller-chosen query set with ids 0..n-1.
Scenario make_scenario(const KnowledgeBase& kb, std::vector<Query> queries, const WorkloadSpec& workload,
                       const InfoModel& model);

struct SimConfig {
  PolicyKind policy = PolicyKind::freqdepth;
  PolicyParams params;
  /// Entry capacity. When absent, round(beta * query_count).
  std::optional<std::size_t> capacity;
  double beta = 0.0;
  ThermoParams thermo;
  /// Leading share of the stream processed but excluded from statistics.
  double warmup_fraction = 0.1;
  double hit_latency = 1.0;

  void validate() const;
};

struct SimMetrics {
  std::size_t capacity = 0;
  bool capacity_clamped = false;
  std::uint64_t accesses = 0;  // measured (post warm-up)
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  double hit_rate = 0.0;
  double mean_latency = 0.0;
  std::uint64_t total_compute_steps = 0;
  double duration = 0.0;  // sum of latencies
  double storage_bits = 0.0;
  double energy = 0.0;
  double amortized_cost = 0.0;  // nats per access
  std::uint64_t evictions = 0;
  std::optional<TrialityCheck> triality;

  bool operator==(const SimMetrics&) const = default;
};

std::size_t resolve_capacity(const Scenario& sc, const SimConfig& cfg, bool* clamped = nullptr);

SimMetrics run_stream(const Scenario& sc, const SimConfig& cfg);

/// Runs the stream against a fixed set of stored answers (no admission).
SimMetrics run_fixed_plan(const Scenario& sc, std::span<const QueryId> stored, const SimConfig& cfg);

struct SweepPoint {
  double beta = 0.0;
  SimMetrics metrics;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  /// gradient[i] = (L[i+1] - L[i]) / (beta[i+1] - beta[i]).
  std::vector<double> gradient;
  std::optional<double> transition_beta;
};

/// One run per beta, in parallel across at most `workers` threads (0 picks the
/// hardware concurrency). Betas must be sorted and lie in [0, 1].
SweepResult sweep_storage(const Scenario& sc, const SimConfig& tmpl, std::span<const double> betas,
                          unsigned workers = 0, double noise_floor = 1e-3);

/// Beta at the largest increase in latency slope (the steep-to-flat knee).
/// Absent with fewer than 5 points or when the largest slope change, scaled by
/// the mean grid step, is at most noise_floor times the latency range.
std::optional<double> detect_transition(std::span<const double> betas, std::span<const double> latency,
                                        double noise_floor = 1e-3);
std::optional<double> detect_transition(const SweepResult& sweep, double noise_floor = 1e-3);

}  // namespace derivd
