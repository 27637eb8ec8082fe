#include "derivd/kb.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>

namespace derivd {

namespace {

// Proof-tree costs can grow exponentially with nesting; saturate instead of
// wrapping.
constexpr std::uint64_t kCostCap = std::uint64_t{1} << 62;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return (a >= kCostCap - b) ? kCostCap : a + b; }

std::vector<char> flags_of(std::size_t n, std::span<const AtomId> atoms) {
  std::vector<char> f(n, 0);
  for (AtomId a : atoms) {
    if (a >= n) throw std::out_of_range("atom " + std::to_string(a) + " outside universe");
    f[a] = 1;
  }
  return f;
}

AtomSet set_of(const std::vector<char>& flags) {
  AtomSet out;
  for (std::size_t i = 0; i < flags.size(); ++i)
    if (flags[i]) out.push_back(static_cast<AtomId>(i));
  return out;
}

// Counter-based forward chaining. Stops early once `stop_at` becomes known.
std::vector<char> chain(const KnowledgeBase& kb, std::vector<char> known,
                        std::optional<AtomId> stop_at = std::nullopt) {
  const auto& rules = kb.rules();
  std::vector<std::uint32_t> remaining(rules.size());
  for (std::size_t r = 0; r < rules.size(); ++r) remaining[r] = static_cast<std::uint32_t>(rules[r].premises.size());

  std::vector<AtomId> queue;
  for (std::size_t a = 0; a < known.size(); ++a)
    if (known[a]) queue.push_back(static_cast<AtomId>(a));
  if (stop_at && known[*stop_at]) return known;

  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (std::uint32_t r : kb.rules_with_premise(queue[head])) {
      if (--remaining[r] != 0) continue;
      const AtomId c = rules[r].conclusion;
      if (known[c]) continue;
      known[c] = 1;
      if (stop_at && c == *stop_at) return known;
      queue.push_back(c);
    }
  }
  return known;
}

}  // namespace

AtomSet make_atom_set(std::vector<AtomId> atoms) {
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  return atoms;
}

KnowledgeBase::KnowledgeBase(std::size_t atom_count, std::vector<AtomId> base_facts, std::vector<HornRule> rules,
                             std::uint64_t generation_seed)
    : atom_count_(atom_count),
      base_facts_(make_atom_set(std::move(base_facts))),
      rules_(std::move(rules)),
      generation_seed_(generation_seed) {
  if (atom_count_ > std::numeric_limits<AtomId>::max()) throw std::invalid_argument("atom_count too large");
  if (!base_facts_.empty() && base_facts_.back() >= atom_count_)
    throw std::invalid_argument("base fact " + std::to_string(base_facts_.back()) + " outside the universe");
  is_base_ = flags_of(atom_count_, base_facts_);

  std::vector<std::uint32_t> degree(atom_count_ + 1, 0);
  id_index_.reserve(rules_.size());
  for (std::size_t r = 0; r < rules_.size(); ++r) {
    auto& rule = rules_[r];
    rule.premises = make_atom_set(std::move(rule.premises));
    if (rule.premises.empty()) throw std::invalid_argument("rule " + std::to_string(rule.id) + " has no premises");
    if (rule.conclusion >= atom_count_ || rule.premises.back() >= atom_count_)
      throw std::invalid_argument("rule " + std::to_string(rule.id) + " references an atom outside the universe");
    if (std::binary_search(rule.premises.begin(), rule.premises.end(), rule.conclusion))
      throw std::invalid_argument("rule " + std::to_string(rule.id) + " concludes one of its premises");
    max_arity_ = std::max(max_arity_, rule.premises.size());
    for (AtomId p : rule.premises) ++degree[p + 1];
    id_index_.emplace_back(rule.id, static_cast<std::uint32_t>(r));
  }
  std::sort(id_index_.begin(), id_index_.end());
  for (std::size_t i = 1; i < id_index_.size(); ++i)
    if (id_index_[i].first == id_index_[i - 1].first)
      throw std::invalid_argument("duplicate rule id " + std::to_string(id_index_[i].first));

  premise_offsets_.assign(atom_count_ + 1, 0);
  for (std::size_t a = 0; a < atom_count_; ++a) premise_offsets_[a + 1] = premise_offsets_[a] + degree[a + 1];
  premise_rules_.resize(premise_offsets_.back());
  std::vector<std::uint32_t> fill(premise_offsets_.begin(), premise_offsets_.end() - 1);
  for (std::size_t r = 0; r < rules_.size(); ++r)
    for (AtomId p : rules_[r].premises) premise_rules_[fill[p]++] = static_cast<std::uint32_t>(r);
}

std::span<const std::uint32_t> KnowledgeBase::rules_with_premise(AtomId a) const {
  return {premise_rules_.data() + premise_offsets_[a], premise_rules_.data() + premise_offsets_[a + 1]};
}

std::size_t KnowledgeBase::index_of(RuleId id) const {
  auto it = std::lower_bound(id_index_.begin(), id_index_.end(), std::make_pair(id, std::uint32_t{0}));
  if (it == id_index_.end() || it->first != id) return npos;
  return it->second;
}

bool KnowledgeBase::rules_equal(const KnowledgeBase& other) const {
  if (rules_.size() != other.rules_.size()) return false;
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const auto& a = rules_[i];
    const auto& b = other.rules_[i];
    if (a.id != b.id || a.conclusion != b.conclusion || a.premises != b.premises) return false;
  }
  return true;
}

AtomSet forward_closure(const KnowledgeBase& kb, std::span<const AtomId> start) {
  return set_of(chain(kb, flags_of(kb.atom_count(), start)));
}

bool is_derivable(const KnowledgeBase& kb, AtomId target, std::span<const AtomId> start) {
  if (target >= kb.atom_count()) throw std::out_of_range("target outside universe");
  return chain(kb, flags_of(kb.atom_count(), start), target)[target] != 0;
}

DerivationForest::DerivationForest(const KnowledgeBase& kb, std::span<const AtomId> start)
    : kb_(&kb), cost_(kb.atom_count(), kUnreachable), best_rule_(kb.atom_count(), KnowledgeBase::npos) {
  const auto& rules = kb.rules();
  std::vector<std::uint32_t> remaining(rules.size());
  std::vector<std::uint64_t> partial(rules.size(), 0);
  for (std::size_t r = 0; r < rules.size(); ++r) remaining[r] = static_cast<std::uint32_t>(rules[r].premises.size());

  using Entry = std::pair<std::uint64_t, AtomId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  for (AtomId a : start) {
    if (a >= kb.atom_count()) throw std::out_of_range("start atom outside universe");
    if (cost_[a] != 0) {
      cost_[a] = 0;
      frontier.emplace(0, a);
    }
  }

  std::vector<char> settled(kb.atom_count(), 0);
  while (!frontier.empty()) {
    const auto [c, a] = frontier.top();
    frontier.pop();
    if (settled[a] || c != cost_[a]) continue;
    settled[a] = 1;
    for (std::uint32_t r : kb.rules_with_premise(a)) {
      partial[r] = sat_add(partial[r], c);
      if (--remaining[r] != 0) continue;
      const AtomId head = rules[r].conclusion;
      const std::uint64_t candidate = sat_add(partial[r], 1);
      if (!settled[head] && candidate < cost_[head]) {
        cost_[head] = candidate;
        frontier.emplace(candidate, head);
      }
    }
  }

  // Every optimal rule has premises strictly cheaper than its head, so any
  // choice yields a well-founded tree; pick the lowest id among them.
  for (std::size_t r = 0; r < rules.size(); ++r) {
    if (remaining[r] != 0) continue;
    const AtomId head = rules[r].conclusion;
    if (cost_[head] == 0 || sat_add(partial[r], 1) != cost_[head]) continue;
    const std::size_t current = best_rule_[head];
    if (current == KnowledgeBase::npos || rules[r].id < rules[current].id) best_rule_[head] = r;
  }
}

std::optional<std::uint64_t> DerivationForest::depth(AtomId a) const {
  if (cost_.at(a) == kUnreachable) return std::nullopt;
  return cost_[a];
}

DerivationResult DerivationForest::derive(AtomId target) const {
  DerivationResult result;
  result.depth = depth(target);
  if (!result.depth || *result.depth == 0) return result;
  if (*result.depth >= kCostCap) throw std::length_error("proof tree too large to enumerate");

  const auto& rules = kb_->rules();
  result.trace.reserve(*result.depth);
  // (atom, expanded) post-order walk of the proof tree.
  std::vector<std::pair<AtomId, bool>> stack{{target, false}};
  while (!stack.empty()) {
    auto [a, expanded] = stack.back();
    stack.pop_back();
    const std::size_t r = best_rule_[a];
    if (r == KnowledgeBase::npos) continue;
    if (expanded) {
      result.trace.push_back(rules[r].id);
      continue;
    }
    stack.emplace_back(a, true);
    const auto& premises = rules[r].premises;
    for (auto it = premises.rbegin(); it != premises.rend(); ++it) stack.emplace_back(*it, false);
  }
  return result;
}

AtomSet DerivationForest::trace_atoms(AtomId target) const {
  if (!depth(target)) return {};
  const auto& rules = kb_->rules();
  std::vector<AtomId> out;
  std::vector<AtomId> stack{target};
  std::vector<char> seen(kb_->atom_count(), 0);
  seen[target] = 1;
  while (!stack.empty()) {
    const AtomId a = stack.back();
    stack.pop_back();
    out.push_back(a);
    const std::size_t r = best_rule_[a];
    if (r == KnowledgeBase::npos) continue;
    for (AtomId p : rules[r].premises) {
      if (!seen[p]) {
        seen[p] = 1;
        stack.push_back(p);
      }
    }
  }
  return make_atom_set(std::move(out));
}

DerivationResult logical_depth(const KnowledgeBase& kb, AtomId target, std::span<const AtomId> start) {
  if (target >= kb.atom_count()) throw std::out_of_range("target outside universe");
  return DerivationForest(kb, start).derive(target);
}

ReplayOutcome replay_trace(const KnowledgeBase& kb, std::span<const RuleId> trace, std::span<const AtomId> start) {
  ReplayOutcome out;
  auto known = flags_of(kb.atom_count(), start);
  out.valid = true;
  for (RuleId id : trace) {
    const std::size_t r = kb.index_of(id);
    if (r == KnowledgeBase::npos) {
      out.valid = false;
      break;
    }
    const auto& rule = kb.rules()[r];
    const bool ready = std::all_of(rule.premises.begin(), rule.premises.end(), [&](AtomId p) { return known[p] != 0; });
    if (!ready) {
      out.valid = false;
      break;
    }
    known[rule.conclusion] = 1;
    ++out.applications;
  }
  out.known = set_of(known);
  return out;
}

AtomSet atomic_decomposition(const KnowledgeBase& kb, std::span<const AtomId> atoms) {
  auto current = flags_of(kb.atom_count(), atoms);
  for (AtomId a : make_atom_set({atoms.begin(), atoms.end()})) {
    current[a] = 0;
    if (!chain(kb, current, a)[a]) current[a] = 1;
  }
  return set_of(current);
}

}  // namespace derivd
