#include "derivd/policies.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "derivd/thermo.hpp"

namespace derivd {

PolicyKind parse_policy(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "lru") return PolicyKind::lru;
  if (lower == "lfu") return PolicyKind::lfu;
  if (lower == "truemi") return PolicyKind::truemi;
  if (lower == "freqdepth") return PolicyKind::freqdepth;
  if (lower == "threshold") return PolicyKind::threshold;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::lru: return "LRU";
    case PolicyKind::lfu: return "LFU";
    case PolicyKind::truemi: return "TrueMI";
    case PolicyKind::freqdepth: return "FreqDepth";
    case PolicyKind::threshold: return "Threshold";
  }
  return "?";
}

bool is_online(PolicyKind kind) {
  return kind == PolicyKind::lru || kind == PolicyKind::lfu || kind == PolicyKind::freqdepth;
}

void PolicyParams::validate(PolicyKind kind) const {
  if (kind == PolicyKind::threshold && !(tau_scale > 0.0)) throw std::invalid_argument("threshold needs tau_scale > 0");
  if (kind == PolicyKind::freqdepth && !(decay > 0.0 && decay <= 1.0))
    throw std::invalid_argument("freqdepth decay must lie in (0, 1]");
}

Route route_query(const StoragePlan& plan, const QueryProfile& profile) {
  if (plan.contains(ItemKind::answer, profile.query.target)) return Route::storage;
  const bool partial = std::any_of(profile.trace_atoms.begin(), profile.trace_atoms.end(),
                                   [&](AtomId a) { return plan.covers(a); });
  return partial ? Route::hybrid : Route::compute;
}

CacheState::CacheState(PolicyKind kind, std::size_t capacity, std::size_t universe, PolicyParams params)
    : kind_(kind),
      capacity_(capacity),
      params_(params),
      in_cache_(universe, 0),
      last_access_(universe, 0),
      count_(universe, 0),
      counter_(universe, 0.0),
      depth_(universe, 0),
      key_of_(universe) {
  params_.validate(kind_);
}

void CacheState::set_oracle_frequencies(std::span<const double> f) {
  if (f.size() != in_cache_.size()) throw std::invalid_argument("oracle frequencies must cover the query universe");
  oracle_f_.assign(f.begin(), f.end());
}

CacheState::Key CacheState::key_for(QueryId q) const {
  switch (kind_) {
    case PolicyKind::lru: return {0.0, last_access_[q], q};
    case PolicyKind::lfu: return {static_cast<double>(count_[q]), last_access_[q], q};
    case PolicyKind::freqdepth: {
      const double freq = params_.oracle_frequency ? oracle_f_.at(q) : counter_[q];
      return {freq * static_cast<double>(depth_[q]), 0, q};
    }
    default: return {0.0, 0, q};
  }
}

void CacheState::touch(QueryId q, std::uint64_t depth) {
  ++tick_;
  last_access_[q] = tick_;
  depth_[q] = depth;
  if (kind_ == PolicyKind::lfu && in_cache_[q]) ++count_[q];
  if (kind_ == PolicyKind::freqdepth && !params_.oracle_frequency) {
    increment_ /= params_.decay;
    counter_[q] += increment_;
    if (increment_ > 1e150) renormalize();
  }
}

void CacheState::renormalize() {
  for (double& c : counter_) c /= increment_;
  increment_ = 1.0;
  order_.clear();
  for (QueryId q = 0; q < in_cache_.size(); ++q) {
    if (!in_cache_[q]) continue;
    key_of_[q] = key_for(q);
    order_.insert(key_of_[q]);
  }
}

void CacheState::insert(QueryId q, std::uint64_t depth) {
  in_cache_[q] = 1;
  depth_[q] = depth;
  ++size_;
  if (kind_ == PolicyKind::lfu) count_[q] = 1;
  if (is_online(kind_)) {
    key_of_[q] = key_for(q);
    order_.insert(key_of_[q]);
  }
}

QueryId CacheState::evict_one() {
  const auto it = order_.begin();
  const QueryId victim = std::get<2>(*it);
  order_.erase(it);
  in_cache_[victim] = 0;
  count_[victim] = 0;
  --size_;
  ++evictions_;
  return victim;
}

void CacheState::preload(std::span<const QueryId> ids, std::span<const std::uint64_t> depths) {
  if (ids.size() != depths.size()) throw std::invalid_argument("preload: ids/depths size mismatch");
  for (std::size_t i = 0; i < ids.size() && size_ < capacity_; ++i) {
    if (ids[i] >= in_cache_.size()) throw std::out_of_range("preload: query id outside the universe");
    if (!in_cache_[ids[i]]) insert(ids[i], depths[i]);
  }
}

StepRecord CacheState::step(QueryId q, std::uint64_t depth) {
  if (q >= in_cache_.size()) throw std::out_of_range("cache step: query id outside the universe");
  StepRecord rec;
  rec.hit = in_cache_[q] != 0;
  const bool online = is_online(kind_);

  if (rec.hit && online) order_.erase(key_of_[q]);
  touch(q, depth);
  if (rec.hit) {
    if (online) {
      key_of_[q] = key_for(q);
      order_.insert(key_of_[q]);
    }
    return rec;
  }
  if (!online || capacity_ == 0) return rec;
  if (size_ >= capacity_) rec.evicted = evict_one();
  insert(q, depth);
  return rec;
}

std::vector<QueryId> CacheState::contents() const {
  std::vector<QueryId> out;
  out.reserve(size_);
  for (QueryId q = 0; q < in_cache_.size(); ++q)
    if (in_cache_[q]) out.push_back(q);
  return out;
}

StepRecord cache_step(CacheState& state, QueryId q, std::uint64_t depth) { return state.step(q, depth); }

StoragePlan truemi_select(std::span<const QueryProfile> profiles, const QueryDistribution& dist,
                          const InfoModel& /*model*/, std::size_t budget) {
  StoragePlan plan(budget);
  const std::size_t n = profiles.size();
  if (n == 0 || budget == 0) return plan;

  // Per-query value of one covered atom, and atom -> queries whose proof uses it.
  std::vector<double> atom_value(n, 0.0);
  AtomId max_atom = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = profiles[i];
    if (!p.trace_atoms.empty()) {
      atom_value[i] = dist.probability(p.query.id) * p.content_nats / static_cast<double>(p.trace_atoms.size());
      max_atom = std::max(max_atom, p.trace_atoms.back());
    }
  }
  std::vector<std::vector<std::uint32_t>> users(static_cast<std::size_t>(max_atom) + 1);
  for (std::size_t i = 0; i < n; ++i)
    for (AtomId a : profiles[i].trace_atoms) users[a].push_back(static_cast<std::uint32_t>(i));

  std::vector<char> covered(users.size(), 0);
  std::vector<std::size_t> uncovered(n);
  std::vector<char> stored(n, 0);
  for (std::size_t i = 0; i < n; ++i) uncovered[i] = profiles[i].trace_atoms.size();

  auto gain = [&](std::size_t i) {
    double g = atom_value[i] * static_cast<double>(uncovered[i]);
    for (AtomId a : profiles[i].trace_atoms) {
      if (covered[a]) continue;
      for (std::uint32_t j : users[a])
        if (j != i && !stored[j]) g += atom_value[j];
    }
    return g;
  };

  struct Entry {
    double gain;
    QueryId id;
    std::size_t index;
    std::size_t round;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.id > b.id;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  for (std::size_t i = 0; i < n; ++i) heap.push({gain(i), profiles[i].query.id, i, 0});

  std::size_t round = 0;
  while (!heap.empty() && plan.size() < budget) {
    Entry top = heap.top();
    heap.pop();
    if (top.round != round) {
      top.gain = gain(top.index);
      top.round = round;
      heap.push(top);
      continue;
    }
    const std::size_t i = top.index;
    plan.add(answer_item(profiles[i]));
    stored[i] = 1;
    uncovered[i] = 0;
    for (AtomId a : profiles[i].trace_atoms) {
      if (covered[a]) continue;
      covered[a] = 1;
      for (std::uint32_t j : users[a])
        if (j != i && uncovered[j] > 0) --uncovered[j];
    }
    ++round;
  }
  return plan;
}

double threshold_score(double f_q, std::uint64_t depth, double h_q) {
  if (!(h_q > 0.0)) throw std::invalid_argument("threshold rule needs h_q > 0");
  return f_q * static_cast<double>(depth) / h_q;
}

bool threshold_decide(double f_q, std::uint64_t depth, double h_q, std::uint64_t atom_count, double tau_scale) {
  if (atom_count < 1) throw std::invalid_argument("threshold rule needs atom_count >= 1");
  const double tau = tau_scale * std::log(static_cast<double>(atom_count));
  return threshold_score(f_q, depth, h_q) > tau;
}

std::vector<QueryId> threshold_rank(std::span<const QueryProfile> profiles, const QueryDistribution& dist) {
  std::vector<std::pair<double, QueryId>> scored;
  scored.reserve(profiles.size());
  for (const auto& p : profiles) {
    const double s = p.content_nats > 0.0 ? threshold_score(dist.probability(p.query.id), p.depth, p.content_nats) : 0.0;
    scored.emplace_back(s, p.query.id);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<QueryId> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back(s.second);
  return out;
}

StoragePlan threshold_select(std::span<const QueryProfile> profiles, const QueryDistribution& dist,
                             std::uint64_t atom_count, double tau_scale, std::size_t budget) {
  StoragePlan plan(budget);
  std::vector<const QueryProfile*> by_id(dist.size(), nullptr);
  for (const auto& p : profiles) by_id.at(p.query.id) = &p;
  for (QueryId id : threshold_rank(profiles, dist)) {
    const QueryProfile& p = *by_id[id];
    if (p.content_nats <= 0.0) continue;
    if (!threshold_decide(dist.probability(id), p.depth, p.content_nats, atom_count, tau_scale)) break;
    if (!plan.add(answer_item(p))) break;
  }
  return plan;
}

std::string to_string(Stratum s) {
  switch (s) {
    case Stratum::high: return "high";
    case Stratum::medium: return "medium";
    case Stratum::low: return "low";
  }
  return "?";
}

std::vector<Stratum> stratify_queries(std::span<const double> frequencies, std::uint64_t atom_count, double c,
                                      double eps_scale) {
  const double f_c = critical_frequency(static_cast<double>(atom_count), c);
  const double log_m = std::log(static_cast<double>(atom_count));
  const double eps = eps_scale / (log_m * log_m);
  std::vector<Stratum> out;
  out.reserve(frequencies.size());
  for (double f : frequencies) {
    if (f > f_c + eps)
      out.push_back(Stratum::high);
    else if (f < f_c - eps)
      out.push_back(Stratum::low);
    else
      out.push_back(Stratum::medium);
  }
  return out;
}

std::vector<Stratum> stratify_queries(const QueryDistribution& dist, std::uint64_t atom_count, double c,
                                      double eps_scale) {
  std::vector<double> relative(dist.weights().begin(), dist.weights().end());
  for (double& f : relative) f *= static_cast<double>(dist.size());
  return stratify_queries(relative, atom_count, c, eps_scale);
}

}  // namespace derivd
