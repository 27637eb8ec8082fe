#include "derivd/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "derivd/parallel.hpp"
#include "derivd/rng.hpp"

namespace derivd {

double Scenario::expected_depth() const {
  double total = 0.0;
  for (const auto& p : profiles) total += dist.probability(p.query.id) * static_cast<double>(p.depth);
  return total;
}

double Scenario::expected_content_bits() const {
  double total = 0.0;
  for (const auto& p : profiles) total += dist.probability(p.query.id) * to_bits(p.content_nats);
  return total;
}

Scenario make_scenario(const KnowledgeBase& kb, const WorkloadSpec& workload, const InfoModel& model) {
  workload.validate();
  return make_scenario(kb, sample_queries(kb, workload.query_count, workload.seed), workload, model);
}

Scenario make_scenario(const KnowledgeBase& kb, std::vector<Query> queries, const WorkloadSpec& workload,
                       const InfoModel& model) {
  Scenario sc;
  sc.kb = &kb;
  sc.model = model;
  sc.workload = workload;
  sc.workload.query_count = queries.size();
  sc.workload.validate();
  sc.profiles = profile_queries(kb, queries, model);
  sc.dist = build_distribution(sc.workload, std::move(queries));
  const auto stream = sample_stream(sc.dist, workload.stream_length, mix_seed(workload.seed, 0x7374));
  sc.stream.reserve(stream.size());
  for (const auto& q : stream) sc.stream.push_back(q.id);
  return sc;
}

void SimConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("storage fraction beta must lie in [0, 1]");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0))
    throw std::invalid_argument("warmup_fraction must lie in [0, 1)");
  if (!(hit_latency > 0.0)) throw std::invalid_argument("hit_latency must be positive");
  thermo.validate();
  params.validate(policy);
}

std::size_t resolve_capacity(const Scenario& sc, const SimConfig& cfg, bool* clamped) {
  const std::size_t n = sc.query_count();
  std::size_t cap = cfg.capacity ? *cfg.capacity
                                 : static_cast<std::size_t>(std::llround(cfg.beta * static_cast<double>(n)));
  const bool over = cap > n;
  if (clamped) *clamped = over;
  return over ? n : cap;
}

namespace {

SimMetrics simulate(const Scenario& sc, const SimConfig& cfg, CacheState& cache) {
  SimMetrics m;
  m.capacity = cache.capacity();
  const std::size_t length = sc.stream.size();
  const auto warm = std::min(static_cast<std::size_t>(std::floor(cfg.warmup_fraction * static_cast<double>(length))),
                             length - 1);

  for (std::size_t t = 0; t < length; ++t) {
    const QueryId q = sc.stream[t];
    const std::uint64_t depth = sc.profiles[q].depth;
    const bool hit = cache.step(q, depth).hit;
    if (t < warm) continue;
    ++m.accesses;
    if (hit) {
      ++m.hits;
      m.duration += cfg.hit_latency;
    } else {
      ++m.misses;
      m.total_compute_steps += depth;
      m.duration += static_cast<double>(std::max<std::uint64_t>(1, depth));
    }
  }

  for (QueryId q : cache.contents()) m.storage_bits += to_bits(sc.profiles[q].content_nats);
  m.evictions = cache.evictions();
  m.hit_rate = static_cast<double>(m.hits) / static_cast<double>(m.accesses);
  m.mean_latency = m.duration / static_cast<double>(m.accesses);

  const auto cost = cost_breakdown(m.storage_bits, static_cast<double>(m.total_compute_steps),
                                   static_cast<double>(m.accesses), m.duration, cfg.thermo);
  m.energy = cost.energy;
  m.amortized_cost = cost.amortized;
  if (m.storage_bits > 0.0)
    m.triality = triality_check(m.energy, m.duration, m.storage_bits, sc.expected_content_bits(), cfg.thermo);
  return m;
}

std::vector<std::uint64_t> depths_of(const Scenario& sc, std::span<const QueryId> ids) {
  std::vector<std::uint64_t> d;
  d.reserve(ids.size());
  for (QueryId q : ids) d.push_back(sc.profiles.at(q).depth);
  return d;
}

std::vector<QueryId> plan_ids(const Scenario& sc, const StoragePlan& plan) {
  std::vector<QueryId> by_atom(sc.kb->atom_count(), static_cast<QueryId>(-1));
  for (const auto& p : sc.profiles) by_atom[p.query.target] = p.query.id;
  std::vector<QueryId> ids;
  for (const auto& e : plan.entries())
    if (e.kind == ItemKind::answer) ids.push_back(by_atom.at(e.atom));
  return ids;
}

}  // namespace

SimMetrics run_fixed_plan(const Scenario& sc, std::span<const QueryId> stored, const SimConfig& cfg) {
  cfg.validate();
  if (sc.stream.empty()) throw std::invalid_argument("scenario has an empty stream");
  CacheState cache(PolicyKind::truemi, stored.size(), sc.query_count());
  const auto depths = depths_of(sc, stored);
  cache.preload(stored, depths);
  return simulate(sc, cfg, cache);
}

SimMetrics run_stream(const Scenario& sc, const SimConfig& cfg) {
  cfg.validate();
  if (sc.stream.empty()) throw std::invalid_argument("scenario has an empty stream");
  bool clamped = false;
  const std::size_t capacity = resolve_capacity(sc, cfg, &clamped);
  const std::size_t n = sc.query_count();

  SimMetrics m;
  if (cfg.policy == PolicyKind::truemi || cfg.policy == PolicyKind::threshold) {
    StoragePlan plan;
    if (cfg.policy == PolicyKind::truemi) {
      std::vector<Query> qs(sc.dist.queries().begin(), sc.dist.queries().end());
      const QueryDistribution blind(std::move(qs), std::vector<double>(n, 1.0 / static_cast<double>(n)),
                                    DistributionKind::uniform);
      plan = truemi_select(sc.profiles, blind, sc.model, capacity);
    } else {
      plan = threshold_select(sc.profiles, sc.dist, sc.kb->atom_count(), cfg.params.tau_scale, capacity);
    }
    const auto ids = plan_ids(sc, plan);
    CacheState cache(cfg.policy, capacity, n, cfg.params);
    cache.preload(ids, depths_of(sc, ids));
    m = simulate(sc, cfg, cache);
  } else {
    CacheState cache(cfg.policy, capacity, n, cfg.params);
    if (cfg.policy == PolicyKind::freqdepth && cfg.params.oracle_frequency) {
      cache.set_oracle_frequencies(sc.dist.weights());
      std::vector<QueryId> ranked(n);
      for (QueryId i = 0; i < n; ++i) ranked[i] = i;
      auto score = [&](QueryId q) { return sc.dist.probability(q) * static_cast<double>(sc.profiles[q].depth); };
      std::sort(ranked.begin(), ranked.end(), [&](QueryId a, QueryId b) {
        const double sa = score(a), sb = score(b);
        if (sa != sb) return sa > sb;
        return a < b;
      });
      ranked.resize(capacity);
      cache.preload(ranked, depths_of(sc, ranked));
    }
    m = simulate(sc, cfg, cache);
  }
  m.capacity_clamped = clamped;
  return m;
}

SweepResult sweep_storage(const Scenario& sc, const SimConfig& tmpl, std::span<const double> betas, unsigned workers,
                          double noise_floor) {
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] >= 0.0 && betas[i] <= 1.0)) throw std::invalid_argument("sweep betas must lie in [0, 1]");
    if (i > 0 && !(betas[i] > betas[i - 1])) throw std::invalid_argument("sweep betas must be strictly increasing");
  }
  SweepResult out;
  out.points.resize(betas.size());
  parallel_for(betas.size(), workers, [&](std::size_t i) {
    SimConfig cfg = tmpl;
    cfg.capacity.reset();
    cfg.beta = betas[i];
    out.points[i] = {betas[i], run_stream(sc, cfg)};
  });

  std::vector<double> latency;
  for (const auto& p : out.points) latency.push_back(p.metrics.mean_latency);
  for (std::size_t i = 0; i + 1 < betas.size(); ++i)
    out.gradient.push_back((latency[i + 1] - latency[i]) / (betas[i + 1] - betas[i]));
  out.transition_beta = detect_transition(betas, latency, noise_floor);
  return out;
}

std::optional<double> detect_transition(std::span<const double> betas, std::span<const double> latency,
                                        double noise_floor) {
  if (betas.size() != latency.size()) throw std::invalid_argument("detect_transition: size mismatch");
  const std::size_t n = betas.size();
  if (n < 5) return std::nullopt;
  const auto [lo, hi] = std::minmax_element(latency.begin(), latency.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return std::nullopt;
  const double mean_step = (betas.back() - betas.front()) / static_cast<double>(n - 1);

  std::size_t best = 0;
  double best_change = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double left = (latency[i] - latency[i - 1]) / (betas[i] - betas[i - 1]);
    const double right = (latency[i + 1] - latency[i]) / (betas[i + 1] - betas[i]);
    const double change = right - left;
    if (change > best_change) {
      best_change = change;
      best = i;
    }
  }
  if (best_change * mean_step <= noise_floor * range) return std::nullopt;
  return betas[best];
}

std::optional<double> detect_transition(const SweepResult& sweep, double noise_floor) {
  std::vector<double> betas, latency;
  for (const auto& p : sweep.points) {
    betas.push_back(p.beta);
    latency.push_back(p.metrics.mean_latency);
  }
  return detect_transition(betas, latency, noise_floor);
}

}  // namespace derivd
