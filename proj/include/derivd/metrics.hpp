#pragma once

// Information quantities over a knowledge base and a query workload.
//
// Semantic content is a computable proxy: a query's content is the encoding
// size of the atoms on its minimal proof (bits_per_atom each), expressed in
// nats. Storing atoms covers part of that proof; the uncovered remainder is
// the residual content, and the frequency-weighted covered part is the mutual
// information between storage and the workload. This makes I(S;Q) a weighted
// coverage function of S.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <unordered_map>
#include <vector>

#include "derivd/kb.hpp"
#include "derivd/storage_plan.hpp"

namespace derivd {

enum class Unit { bits, nats };

inline constexpr double kLn2 = std::numbers::ln2;

constexpr double to_bits(double nats) { return nats / kLn2; }
constexpr double to_nats(double bits) { return bits * kLn2; }

enum class ContentMode { structural, synthetic };

struct InfoModel {
  double c = 1.0;
  double bits_per_atom = 1.0;
  ContentMode mode = ContentMode::structural;
  /// Seed for synthetic content draws.
  std::uint64_t seed = 0;

  /// bits_per_atom = ceil(log2 atom_count), at least 1.
  static InfoModel for_kb(const KnowledgeBase& kb, double c = 1.0);
  void validate() const;
};

enum class DistributionKind { uniform, zipf, custom };

/// Probabilities over a query set whose ids are 0..n-1 in order.
class QueryDistribution {
 public:
  QueryDistribution() = default;
  /// Throws std::invalid_argument unless weights are positive, sum to 1 within
  /// 1e-9, and queries[i].id == i.
  QueryDistribution(std::vector<Query> queries, std::vector<double> weights,
                    DistributionKind kind = DistributionKind::custom, double alpha = 0.0);

  std::span<const Query> queries() const { return queries_; }
  std::span<const double> weights() const { return weights_; }
  double probability(QueryId id) const { return weights_.at(id); }
  std::size_t size() const { return queries_.size(); }
  bool empty() const { return queries_.empty(); }
  DistributionKind kind() const { return kind_; }
  double alpha() const { return alpha_; }

 private:
  std::vector<Query> queries_;
  std::vector<double> weights_;
  DistributionKind kind_ = DistributionKind::custom;
  double alpha_ = 0.0;
};

/// Per-query facts derived once from the knowledge base.
struct QueryProfile {
  Query query;
  std::uint64_t depth = 0;
  AtomSet trace_atoms;
  double content_nats = 0.0;
};

/// Profiles every query against the base facts. Throws std::invalid_argument
/// if a query is not answerable.
std::vector<QueryProfile> profile_queries(const KnowledgeBase& kb, std::span<const Query> queries,
                                          const InfoModel& model);
QueryProfile profile_query(const KnowledgeBase& kb, const Query& q, const InfoModel& model);

/// Stored answer for a profiled query; costs its content in bits.
StoredItem answer_item(const QueryProfile& profile);
StoredItem atom_item(AtomId atom, const InfoModel& model);

double shannon_entropy(const QueryDistribution& dist, Unit unit);
double shannon_entropy(std::span<const double> probabilities, Unit unit);

/// depth * ln 2, in nats.
double derivation_entropy(std::uint64_t depth);

double semantic_content(const KnowledgeBase& kb, const Query& q, const InfoModel& model);

double residual_content(const QueryProfile& profile, const StoragePlan& plan, const InfoModel& model);
double residual_content(const KnowledgeBase& kb, const Query& q, const StoragePlan& plan, const InfoModel& model);

/// Sum over queries of f_q * (content - residual), in nats.
double mutual_info(std::span<const QueryProfile> profiles, const StoragePlan& plan, const QueryDistribution& dist,
                   const InfoModel& model);
double mutual_info(const KnowledgeBase& kb, const StoragePlan& plan, const QueryDistribution& dist,
                   const InfoModel& model);

/// I(S;Q) in bits over |S| in bits. Throws on an empty plan and
/// std::logic_error if the ratio exceeds 1 (a modelling bug, never clamped).
double storage_efficiency(std::span<const QueryProfile> profiles, const StoragePlan& plan,
                          const QueryDistribution& dist, const InfoModel& model);
double storage_efficiency(const KnowledgeBase& kb, const StoragePlan& plan, const QueryDistribution& dist,
                          const InfoModel& model);

struct DerivationBounds {
  double lower = 0.0;      // nats
  double upper = 0.0;      // nats
  double h_derive = 0.0;   // nats
  bool satisfied = false;
};

/// Lower and upper envelopes on derivation entropy for content h_q (nats),
/// depth and atomic-basis size m. The asymptotic slack terms are taken as
/// c * log2(m).
DerivationBounds derivation_bounds_check(double h_q, std::uint64_t depth, std::uint64_t m, const InfoModel& model);

/// Content of one query plus memoized residuals keyed by plan fingerprint.
/// Not synchronized; keep one instance per worker.
class ContentEstimate {
 public:
  ContentEstimate(QueryProfile profile, InfoModel model) : profile_(std::move(profile)), model_(model) {}

  double h_q() const { return profile_.content_nats; }
  double residual(const StoragePlan& plan);
  std::size_t memo_size() const { return memo_.size(); }

 private:
  QueryProfile profile_;
  InfoModel model_;
  std::unordered_map<std::uint64_t, double> memo_;
};

}  // namespace derivd
