#include "derivd/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "derivd/rng.hpp"

namespace derivd {

InfoModel InfoModel::for_kb(const KnowledgeBase& kb, double c) {
  InfoModel m;
  m.c = c;
  m.bits_per_atom = std::max(1.0, std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(kb.atom_count(), 2)))));
  return m;
}

void InfoModel::validate() const {
  if (!(c > 0.0)) throw std::invalid_argument("InfoModel: c must be positive");
  if (!(bits_per_atom >= 1.0)) throw std::invalid_argument("InfoModel: bits_per_atom must be at least 1");
}

QueryDistribution::QueryDistribution(std::vector<Query> queries, std::vector<double> weights, DistributionKind kind,
                                     double alpha)
    : queries_(std::move(queries)), weights_(std::move(weights)), kind_(kind), alpha_(alpha) {
  if (queries_.size() != weights_.size()) throw std::invalid_argument("QueryDistribution: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < queries_.size(); ++i) {
    if (queries_[i].id != i) throw std::invalid_argument("QueryDistribution: query ids must be 0..n-1 in order");
    if (!(weights_[i] > 0.0)) throw std::invalid_argument("QueryDistribution: weights must be positive");
    total += weights_[i];
  }
  if (!queries_.empty() && std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("QueryDistribution: weights sum to " + std::to_string(total));
}

QueryProfile profile_query(const KnowledgeBase& kb, const Query& q, const InfoModel& model) {
  return profile_queries(kb, std::span<const Query>(&q, 1), model).front();
}

std::vector<QueryProfile> profile_queries(const KnowledgeBase& kb, std::span<const Query> queries,
                                          const InfoModel& model) {
  model.validate();
  DerivationForest forest(kb, kb.base_facts());
  std::vector<QueryProfile> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    const auto depth = forest.depth(q.target);
    if (!depth) throw std::invalid_argument("query " + std::to_string(q.id) + " is not answerable");
    QueryProfile p;
    p.query = q;
    p.depth = *depth;
    p.trace_atoms = forest.trace_atoms(q.target);
    const double base = static_cast<double>(p.trace_atoms.size()) * model.bits_per_atom * kLn2;
    if (model.mode == ContentMode::structural) {
      p.content_nats = base;
    } else {
      Xoshiro256 rng(mix_seed(model.seed, q.target));
      p.content_nats = base * (0.5 + rng.uniform01());
    }
    out.push_back(std::move(p));
  }
  return out;
}

StoredItem answer_item(const QueryProfile& profile) {
  return StoredItem{ItemKind::answer, profile.query.target, to_bits(profile.content_nats), profile.trace_atoms};
}

StoredItem atom_item(AtomId atom, const InfoModel& model) {
  return StoredItem{ItemKind::atom, atom, model.bits_per_atom, {atom}};
}

double shannon_entropy(std::span<const double> probabilities, Unit unit) {
  if (probabilities.empty()) throw std::invalid_argument("entropy of an empty distribution");
  double h = 0.0;
  for (double p : probabilities)
    if (p > 0.0) h -= p * std::log(p);
  return unit == Unit::nats ? h : to_bits(h);
}

double shannon_entropy(const QueryDistribution& dist, Unit unit) { return shannon_entropy(dist.weights(), unit); }

double derivation_entropy(std::uint64_t depth) { return static_cast<double>(depth) * kLn2; }

double semantic_content(const KnowledgeBase& kb, const Query& q, const InfoModel& model) {
  return profile_query(kb, q, model).content_nats;
}

double residual_content(const QueryProfile& profile, const StoragePlan& plan, const InfoModel& model) {
  if (profile.trace_atoms.empty()) return 0.0;
  if (plan.contains(ItemKind::answer, profile.query.target)) return 0.0;
  std::size_t uncovered = 0;
  for (AtomId a : profile.trace_atoms)
    if (!plan.covers(a)) ++uncovered;
  if (model.mode == ContentMode::structural) return static_cast<double>(uncovered) * model.bits_per_atom * kLn2;
  return profile.content_nats * static_cast<double>(uncovered) / static_cast<double>(profile.trace_atoms.size());
}

double residual_content(const KnowledgeBase& kb, const Query& q, const StoragePlan& plan, const InfoModel& model) {
  return residual_content(profile_query(kb, q, model), plan, model);
}

double mutual_info(std::span<const QueryProfile> profiles, const StoragePlan& plan, const QueryDistribution& dist,
                   const InfoModel& model) {
  double total = 0.0;
  for (const auto& p : profiles) {
    const double covered = p.content_nats - residual_content(p, plan, model);
    total += dist.probability(p.query.id) * covered;
  }
  return total;
}

double mutual_info(const KnowledgeBase& kb, const StoragePlan& plan, const QueryDistribution& dist,
                   const InfoModel& model) {
  const auto profiles = profile_queries(kb, dist.queries(), model);
  return mutual_info(profiles, plan, dist, model);
}

double storage_efficiency(std::span<const QueryProfile> profiles, const StoragePlan& plan,
                          const QueryDistribution& dist, const InfoModel& model) {
  if (plan.empty() || !(plan.total_bits() > 0.0)) throw std::invalid_argument("storage efficiency of an empty plan");
  const double eta = to_bits(mutual_info(profiles, plan, dist, model)) / plan.total_bits();
  if (eta > 1.0 + 1e-9) throw std::logic_error("storage efficiency " + std::to_string(eta) + " exceeds 1");
  return eta;
}

double storage_efficiency(const KnowledgeBase& kb, const StoragePlan& plan, const QueryDistribution& dist,
                          const InfoModel& model) {
  const auto profiles = profile_queries(kb, dist.queries(), model);
  return storage_efficiency(profiles, plan, dist, model);
}

DerivationBounds derivation_bounds_check(double h_q, std::uint64_t depth, std::uint64_t m, const InfoModel& model) {
  model.validate();
  if (m < 1) throw std::invalid_argument("derivation bounds: m must be at least 1");
  const double span = static_cast<double>(m) + static_cast<double>(depth);
  if (span < 2.0) throw std::invalid_argument("derivation bounds: m + depth must be at least 2");
  const double log_span = std::log2(span);
  const double slack = model.c * std::log2(static_cast<double>(m));

  DerivationBounds b;
  b.h_derive = derivation_entropy(depth);
  b.lower = h_q / (model.c * log_span) - slack;
  b.upper = h_q * model.c * log_span / kLn2 + slack;
  b.satisfied = b.lower <= b.h_derive && b.h_derive <= b.upper;
  return b;
}

double ContentEstimate::residual(const StoragePlan& plan) {
  const auto key = plan.fingerprint();
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  const double value = residual_content(profile_, plan, model_);
  memo_.emplace(key, value);
  return value;
}

}  // namespace derivd
