#pragma once

// Small hand-built KBs, a random Horn KB generator for property tests and an
// independent value-iteration oracle for proof-tree depth.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "derivd/kb.hpp"
#include "derivd/rng.hpp"

namespace fixtures {

using derivd::AtomId;
using derivd::HornRule;
using derivd::KnowledgeBase;

inline HornRule rule(std::uint32_t id, std::vector<AtomId> premises, AtomId conclusion) {
  return HornRule{std::move(premises), conclusion, id};
}

// a=0 -> b=1 -> c=2
inline KnowledgeBase chain_kb() { return KnowledgeBase(3, {0}, {rule(0, {0}, 1), rule(1, {1}, 2)}); }

// a=0; a->b=1; a->c=2; {b,c}->d=3
inline KnowledgeBase diamond_kb() {
  return KnowledgeBase(4, {0}, {rule(0, {0}, 1), rule(1, {0}, 2), rule(2, {1, 2}, 3)});
}

/// Random Horn KB, possibly cyclic, with few atoms so closures stay small.
inline KnowledgeBase random_kb(std::uint64_t seed, std::size_t atoms = 12, std::size_t rules = 20,
                               std::size_t max_arity = 3) {
  derivd::Xoshiro256 rng(seed);
  std::vector<AtomId> base;
  for (AtomId a = 0; a < atoms; ++a)
    if (rng.below(4) == 0) base.push_back(a);
  if (base.empty()) base.push_back(static_cast<AtomId>(rng.below(atoms)));
  std::vector<HornRule> rs;
  for (std::uint32_t id = 0; id < rules; ++id) {
    const auto head = static_cast<AtomId>(rng.below(atoms));
    const std::size_t arity = 1 + rng.below(max_arity);
    std::vector<AtomId> prem;
    while (prem.size() < arity) {
      const auto p = static_cast<AtomId>(rng.below(atoms));
      if (p != head && std::find(prem.begin(), prem.end(), p) == prem.end()) prem.push_back(p);
    }
    std::sort(prem.begin(), prem.end());
    rs.push_back(rule(id, prem, head));
  }
  return KnowledgeBase(atoms, base, rs, seed);
}

/// Random subset of 0..n-1, each atom kept with probability 1/den.
inline std::vector<AtomId> random_subset(derivd::Xoshiro256& rng, std::size_t n, std::uint64_t den = 3) {
  std::vector<AtomId> out;
  for (AtomId a = 0; a < n; ++a)
    if (rng.below(den) == 0) out.push_back(a);
  return out;
}

/// Proof-tree cost by plain value iteration (Bellman-Ford over hyperedges).
inline std::vector<std::optional<std::uint64_t>> depth_oracle(const KnowledgeBase& kb,
                                                               const std::vector<AtomId>& start) {
  constexpr std::uint64_t inf = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> cost(kb.atom_count(), inf);
  for (AtomId a : start) cost[a] = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : kb.rules()) {
      std::uint64_t sum = 1;
      bool ok = true;
      for (AtomId p : r.premises) {
        if (cost[p] == inf) {
          ok = false;
          break;
        }
        sum += cost[p];
      }
      if (ok && sum < cost[r.conclusion]) {
        cost[r.conclusion] = sum;
        changed = true;
      }
    }
  }
  std::vector<std::optional<std::uint64_t>> out(kb.atom_count());
  for (std::size_t a = 0; a < cost.size(); ++a)
    if (cost[a] != inf) out[a] = cost[a];
  return out;
}

/// Closure by naive repeated passes over every rule.
inline std::vector<AtomId> closure_oracle(const KnowledgeBase& kb, const std::vector<AtomId>& start) {
  std::vector<char> known(kb.atom_count(), 0);
  for (AtomId a : start) known[a] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : kb.rules()) {
      if (known[r.conclusion]) continue;
      if (std::all_of(r.premises.begin(), r.premises.end(), [&](AtomId p) { return known[p] != 0; })) {
        known[r.conclusion] = 1;
        changed = true;
      }
    }
  }
  std::vector<AtomId> out;
  for (AtomId a = 0; a < kb.atom_count(); ++a)
    if (known[a]) out.push_back(a);
  return out;
}

}  // namespace fixtures
