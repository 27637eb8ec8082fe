#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "derivd/kb.hpp"
#include "derivd/metrics.hpp"
#include "derivd/storage_plan.hpp"

namespace derivd {

enum class PolicyKind { lru, lfu, truemi, freqdepth, threshold };

/// Parses lru|lfu|truemi|freqdepth|threshold (case-insensitive).
PolicyKind parse_policy(std::string_view name);
std::string to_string(PolicyKind kind);
bool is_online(PolicyKind kind);

struct PolicyParams {
  /// Threshold: tau = tau_scale * ln(atom_count).
  double tau_scale = 1.0;
  /// FreqDepth: per-access decay of the online frequency counter.
  double decay = 0.9999;
  /// FreqDepth: rank by true f_q * depth instead of the online counter.
  bool oracle_frequency = false;

  void validate(PolicyKind kind) const;
};

enum class Route { storage, compute, hybrid };

/// storage if the answer is stored, hybrid if stored atoms cover part of the
/// proof, compute otherwise.
Route route_query(const StoragePlan& plan, const QueryProfile& profile);

struct StepRecord {
  bool hit = false;
  std::optional<QueryId> evicted;
};

/// Mutable cache over a dense query universe 0..n-1.
///
/// Online policies admit every miss. Static policies (TrueMI, Threshold) hold
/// a preloaded set and never admit.
class CacheState {
 public:
  CacheState(PolicyKind kind, std::size_t capacity, std::size_t universe, PolicyParams params = {});

  /// Oracle FreqDepth scores; f[i] is the access probability of query i.
  void set_oracle_frequencies(std::span<const double> f);
  /// Inserts ids in order until full, without counting as accesses.
  void preload(std::span<const QueryId> ids, std::span<const std::uint64_t> depths);

  StepRecord step(QueryId q, std::uint64_t depth);

  bool contains(QueryId q) const { return q < in_cache_.size() && in_cache_[q]; }
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  PolicyKind kind() const { return kind_; }
  std::uint64_t evictions() const { return evictions_; }
  /// Cached ids in ascending order.
  std::vector<QueryId> contents() const;

 private:
  using Key = std::tuple<double, std::uint64_t, QueryId>;

  Key key_for(QueryId q) const;
  void touch(QueryId q, std::uint64_t depth);
  void insert(QueryId q, std::uint64_t depth);
  QueryId evict_one();
  void renormalize();

  PolicyKind kind_;
  std::size_t capacity_;
  PolicyParams params_;
  std::size_t size_ = 0;
  std::uint64_t tick_ = 0;
  std::uint64_t evictions_ = 0;

  std::vector<char> in_cache_;
  std::vector<std::uint64_t> last_access_;
  std::vector<std::uint64_t> count_;   // LFU, reset on eviction
  std::vector<double> counter_;        // FreqDepth, scaled by 1/increment_
  std::vector<std::uint64_t> depth_;
  std::vector<double> oracle_f_;
  double increment_ = 1.0;
  std::set<Key> order_;
  std::vector<Key> key_of_;
};

/// Convenience wrapper for one access.
StepRecord cache_step(CacheState& state, QueryId q, std::uint64_t depth);

/// Lazy-greedy maximization of mutual_info over stored answers, at most
/// `budget` entries. Equal gains resolve to the lower query id. Pass a uniform
/// distribution for the frequency-blind selector.
StoragePlan truemi_select(std::span<const QueryProfile> profiles, const QueryDistribution& dist,
                          const InfoModel& model, std::size_t budget);

/// f_q * depth / h_q > tau_scale * ln(atom_count). Throws if h_q <= 0.
bool threshold_decide(double f_q, std::uint64_t depth, double h_q, std::uint64_t atom_count, double tau_scale);

/// Score f_q * depth / h_q used by the threshold rule.
double threshold_score(double f_q, std::uint64_t depth, double h_q);

/// Queries ranked by threshold score, highest first (ties: lower id).
std::vector<QueryId> threshold_rank(std::span<const QueryProfile> profiles, const QueryDistribution& dist);

/// Queries passing the threshold rule, highest score first, at most `budget`.
StoragePlan threshold_select(std::span<const QueryProfile> profiles, const QueryDistribution& dist,
                             std::uint64_t atom_count, double tau_scale, std::size_t budget);

enum class Stratum { high, medium, low };
std::string to_string(Stratum s);

/// Classifies relative access frequencies f_q = n * p_q against the critical
/// frequency with margin eps = eps_scale / (ln atom_count)^2. Indexed by id.
std::vector<Stratum> stratify_queries(const QueryDistribution& dist, std::uint64_t atom_count, double c,
                                      double eps_scale);
/// Same classification for caller-supplied frequency values.
std::vector<Stratum> stratify_queries(std::span<const double> frequencies, std::uint64_t atom_count, double c,
                                      double eps_scale);

}  // namespace derivd
