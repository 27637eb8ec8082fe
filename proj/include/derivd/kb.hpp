#pragma once

// Propositional Horn knowledge bases: forward chaining, minimal-derivation
// depth (shortest hyperpath with additive proof-tree cost) and atomic
// decomposition.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace derivd {

using AtomId = std::uint32_t;
using RuleId = std::uint32_t;
using QueryId = std::uint32_t;

/// Sorted, duplicate-free list of atoms.
using AtomSet = std::vector<AtomId>;

AtomSet make_atom_set(std::vector<AtomId> atoms);

struct HornRule {
  std::vector<AtomId> premises;  // sorted, unique, non-empty
  AtomId conclusion = 0;
  RuleId id = 0;
};

struct Query {
  AtomId target = 0;
  QueryId id = 0;

  friend bool operator==(const Query&, const Query&) = default;
};

class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  /// Validates every invariant and throws std::invalid_argument on violation:
  /// atoms in range, premises non-empty, conclusion not among its premises,
  /// unique rule ids.
  KnowledgeBase(std::size_t atom_count, std::vector<AtomId> base_facts, std::vector<HornRule> rules,
                std::uint64_t generation_seed = 0);

  std::size_t atom_count() const { return atom_count_; }
  const AtomSet& base_facts() const { return base_facts_; }
  const std::vector<HornRule>& rules() const { return rules_; }
  std::uint64_t generation_seed() const { return generation_seed_; }
  std::size_t max_arity() const { return max_arity_; }

  bool is_base(AtomId a) const { return is_base_[a] != 0; }

  /// Rule indices (positions in rules()) that use `a` as a premise.
  std::span<const std::uint32_t> rules_with_premise(AtomId a) const;
  /// Rule index for a rule id, or npos.
  std::size_t index_of(RuleId id) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
    return a.atom_count_ == b.atom_count_ && a.base_facts_ == b.base_facts_ &&
           a.generation_seed_ == b.generation_seed_ && a.rules_equal(b);
  }

 private:
  bool rules_equal(const KnowledgeBase& other) const;

  std::size_t atom_count_ = 0;
  AtomSet base_facts_;
  std::vector<HornRule> rules_;
  std::uint64_t generation_seed_ = 0;
  std::size_t max_arity_ = 0;
  std::vector<char> is_base_;
  // CSR adjacency: premise atom -> rule indices.
  std::vector<std::uint32_t> premise_offsets_;
  std::vector<std::uint32_t> premise_rules_;
  std::vector<std::pair<RuleId, std::uint32_t>> id_index_;  // sorted by id
};

struct DerivationResult {
  /// Minimal number of rule applications; absent when not derivable.
  std::optional<std::uint64_t> depth;
  /// Post-order proof tree: replaying in order derives the target using
  /// exactly `depth` applications. Shared sub-proofs appear once per use.
  std::vector<RuleId> trace;

  bool derivable() const { return depth.has_value(); }
};

/// Least fixpoint of rule application from `start`.
AtomSet forward_closure(const KnowledgeBase& kb, std::span<const AtomId> start);

bool is_derivable(const KnowledgeBase& kb, AtomId target, std::span<const AtomId> start);

/// Minimal proof-tree cost for every atom from a fixed start set, computed once
/// and queried many times. Cost(a) = 0 for a in start, and
/// cost(head) = min over rules (1 + sum of premise costs). Ties between rules
/// of equal cost go to the lowest rule id.
class DerivationForest {
 public:
  DerivationForest(const KnowledgeBase& kb, std::span<const AtomId> start);

  std::optional<std::uint64_t> depth(AtomId a) const;
  /// Rule index (not id) chosen for `a`; npos for start atoms and underivable atoms.
  std::size_t best_rule(AtomId a) const { return best_rule_[a]; }
  DerivationResult derive(AtomId target) const;
  /// Every atom that appears in the minimal proof of `target`, the target included.
  AtomSet trace_atoms(AtomId target) const;

  const KnowledgeBase& kb() const { return *kb_; }

 private:
  const KnowledgeBase* kb_;
  std::vector<std::uint64_t> cost_;
  std::vector<std::size_t> best_rule_;
};

inline constexpr std::uint64_t kUnreachable = static_cast<std::uint64_t>(-1);

DerivationResult logical_depth(const KnowledgeBase& kb, AtomId target, std::span<const AtomId> start);

/// Replays a trace from `start`; returns the number of applications and
/// whether each rule fired with all premises present.
struct ReplayOutcome {
  bool valid = false;
  std::uint64_t applications = 0;
  AtomSet known;
};
ReplayOutcome replay_trace(const KnowledgeBase& kb, std::span<const RuleId> trace, std::span<const AtomId> start);

/// Atoms of `atoms` not derivable from the rest. Removal is sequential in
/// ascending atom order, which coincides with the simultaneous definition
/// for acyclic rule sets and keeps the closure intact for cyclic ones.
AtomSet atomic_decomposition(const KnowledgeBase& kb, std::span<const AtomId> atoms);

// --- generation -----------------------------------------------------------

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KbSpec {
  std::size_t atom_count = 1000;
  std::size_t rule_count = 3000;
  double target_mean_depth = 5.0;
  std::size_t max_arity = 2;
  std::uint64_t seed = 42;
  /// Fraction of atoms that are base facts (level 0).
  double base_fraction = 0.1;
};

/// Layered acyclic generator. Atoms are split into levels; level 0 holds the
/// base facts and every rule concludes one level above its highest premise.
/// The level count is searched until the mean query depth (over derivable
/// non-base atoms) lies within 30% of the target.
KnowledgeBase generate_kb(const KbSpec& spec);
KnowledgeBase generate_kb(std::size_t atom_count, std::size_t rule_count, double target_mean_depth,
                          std::size_t max_arity, std::uint64_t seed);

/// Derivable non-base atoms, ascending. With no rules, every atom.
std::vector<AtomId> query_candidates(const KnowledgeBase& kb);

/// `count` queries drawn uniformly without replacement from query_candidates;
/// ids are 0..count-1 in draw order. Throws GenerationError when too few
/// candidates exist. count == 0 takes every candidate in shuffled order.
std::vector<Query> sample_queries(const KnowledgeBase& kb, std::size_t count, std::uint64_t seed);

/// Mean depth over query_candidates.
double mean_candidate_depth(const KnowledgeBase& kb);

// --- text format ------------------------------------------------------------
//
//   atoms N
//   seed S            (optional)
//   base i j k ...
//   rule <id>: p1 p2 -> c
//
// Blank lines and lines starting with '#' are ignored.

std::string to_text(const KnowledgeBase& kb);
KnowledgeBase kb_from_text(const std::string& text);
void save_kb(const KnowledgeBase& kb, const std::string& path);
KnowledgeBase load_kb(const std::string& path);

}  // namespace derivd
