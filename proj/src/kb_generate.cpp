#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "derivd/kb.hpp"
#include "derivd/rng.hpp"

namespace derivd {

namespace {

// Probability that a non-spine premise is drawn from a derived level rather
// than from the base facts.
constexpr double kDeepPremiseProbability = 0.25;
constexpr double kDepthTolerance = 0.30;

struct Layout {
  std::vector<AtomId> base;
  std::vector<std::vector<AtomId>> levels;  // levels[0] == base
};

template <typename T>
void shuffle(std::vector<T>& v, Xoshiro256& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

KnowledgeBase build_layered(const KbSpec& spec, std::size_t level_count) {
  Xoshiro256 rng(mix_seed(spec.seed, 0x6b62));
  std::vector<AtomId> perm(spec.atom_count);
  std::iota(perm.begin(), perm.end(), AtomId{0});
  shuffle(perm, rng);

  const auto base_count = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(static_cast<double>(spec.atom_count) * spec.base_fraction)),
      spec.max_arity, spec.atom_count - 1);
  const std::size_t derived = std::min(spec.atom_count - base_count, spec.rule_count);

  Layout layout;
  layout.base.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(base_count));
  layout.levels.resize(level_count + 1);
  layout.levels[0] = layout.base;
  std::vector<std::size_t> level_of(spec.atom_count, 0);
  for (std::size_t i = 0; i < derived; ++i) {
    const std::size_t level = 1 + i * level_count / derived;
    const AtomId a = perm[base_count + i];
    layout.levels[level].push_back(a);
    level_of[a] = level;
  }

  auto pick = [&](const std::vector<AtomId>& pool) { return pool[rng.below(pool.size())]; };

  std::vector<HornRule> rules;
  rules.reserve(spec.rule_count);
  auto make_rule = [&](AtomId head) {
    const std::size_t level = level_of[head];
    const std::size_t arity = 2 + rng.below(spec.max_arity - 1);
    HornRule rule;
    rule.conclusion = head;
    rule.id = static_cast<RuleId>(rules.size());
    rule.premises.push_back(pick(layout.levels[level - 1]));
    // Bounded retries keep premises distinct without looping forever on tiny pools.
    for (std::size_t attempt = 0; rule.premises.size() < arity && attempt < 8 * arity; ++attempt) {
      AtomId p;
      if (level >= 2 && rng.uniform01() < kDeepPremiseProbability) {
        const std::size_t lower = 1 + rng.below(level - 1);
        p = pick(layout.levels[lower]);
      } else {
        p = pick(layout.base);
      }
      if (std::find(rule.premises.begin(), rule.premises.end(), p) == rule.premises.end()) rule.premises.push_back(p);
    }
    rules.push_back(std::move(rule));
  };

  for (std::size_t i = 0; i < derived; ++i) make_rule(perm[base_count + i]);
  for (std::size_t extra = derived; extra < spec.rule_count; ++extra) make_rule(perm[base_count + rng.below(derived)]);

  return KnowledgeBase(spec.atom_count, std::move(layout.base), std::move(rules), spec.seed);
}

}  // namespace

std::vector<AtomId> query_candidates(const KnowledgeBase& kb) {
  std::vector<AtomId> out;
  if (kb.rules().empty()) {
    out.resize(kb.atom_count());
    std::iota(out.begin(), out.end(), AtomId{0});
    return out;
  }
  DerivationForest forest(kb, kb.base_facts());
  for (std::size_t a = 0; a < kb.atom_count(); ++a) {
    const auto d = forest.depth(static_cast<AtomId>(a));
    if (d && *d > 0) out.push_back(static_cast<AtomId>(a));
  }
  return out;
}

double mean_candidate_depth(const KnowledgeBase& kb) {
  const auto candidates = query_candidates(kb);
  if (candidates.empty()) return 0.0;
  DerivationForest forest(kb, kb.base_facts());
  double total = 0.0;
  for (AtomId a : candidates) total += static_cast<double>(forest.depth(a).value_or(0));
  return total / static_cast<double>(candidates.size());
}

std::vector<Query> sample_queries(const KnowledgeBase& kb, std::size_t count, std::uint64_t seed) {
  auto candidates = query_candidates(kb);
  if (count > candidates.size())
    throw GenerationError("requested " + std::to_string(count) + " queries but only " +
                          std::to_string(candidates.size()) + " derivable atoms exist");
  Xoshiro256 rng(mix_seed(seed, 0x7179));
  shuffle(candidates, rng);
  if (count == 0) count = candidates.size();
  std::vector<Query> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = Query{candidates[i], static_cast<QueryId>(i)};
  return out;
}

KnowledgeBase generate_kb(const KbSpec& spec) {
  if (spec.atom_count < 10) throw std::invalid_argument("atom_count must be at least 10");
  if (spec.max_arity < 2 || spec.max_arity > 4) throw std::invalid_argument("max_arity must lie in [2, 4]");
  if (!(spec.target_mean_depth > 0.0)) throw std::invalid_argument("target_mean_depth must be positive");
  if (!(spec.base_fraction > 0.0 && spec.base_fraction < 1.0)) throw std::invalid_argument("base_fraction must lie in (0, 1)");

  if (spec.rule_count == 0) {
    std::vector<AtomId> all(spec.atom_count);
    std::iota(all.begin(), all.end(), AtomId{0});
    return KnowledgeBase(spec.atom_count, std::move(all), {}, spec.seed);
  }

  const auto base_count = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(static_cast<double>(spec.atom_count) * spec.base_fraction)),
      spec.max_arity, spec.atom_count - 1);
  const std::size_t derived = std::min(spec.atom_count - base_count, spec.rule_count);
  const std::size_t max_levels =
      std::min<std::size_t>(derived, static_cast<std::size_t>(std::ceil(4.0 * spec.target_mean_depth)) + 4);

  std::map<std::size_t, double> measured;
  auto evaluate = [&](std::size_t levels) {
    auto it = measured.find(levels);
    if (it == measured.end()) it = measured.emplace(levels, mean_candidate_depth(build_layered(spec, levels))).first;
    return it->second;
  };

  // Mean depth grows with the level count; find the first count reaching the
  // target and compare it with its predecessor.
  std::size_t lo = 1, hi = max_levels;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (evaluate(mid) < spec.target_mean_depth) lo = mid + 1;
    else hi = mid;
  }
  std::size_t best = lo;
  if (lo > 1 && std::abs(evaluate(lo - 1) - spec.target_mean_depth) < std::abs(evaluate(lo) - spec.target_mean_depth))
    best = lo - 1;

  const double achieved = evaluate(best);
  if (std::abs(achieved - spec.target_mean_depth) > kDepthTolerance * spec.target_mean_depth)
    throw GenerationError("cannot reach mean depth " + std::to_string(spec.target_mean_depth) + " with " +
                          std::to_string(spec.rule_count) + " rules over " + std::to_string(spec.atom_count) +
                          " atoms (closest: " + std::to_string(achieved) + ")");
  return build_layered(spec, best);
}

KnowledgeBase generate_kb(std::size_t atom_count, std::size_t rule_count, double target_mean_depth,
                          std::size_t max_arity, std::uint64_t seed) {
  KbSpec spec;
  spec.atom_count = atom_count;
  spec.rule_count = rule_count;
  spec.target_mean_depth = target_mean_depth;
  spec.max_arity = max_arity;
  spec.seed = seed;
  return generate_kb(spec);
}

}  // namespace derivd
