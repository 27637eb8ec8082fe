#include "derivd/storage_plan.hpp"

#include <algorithm>
#include <iterator>

#include "derivd/rng.hpp"

namespace derivd {

bool StoragePlan::add(StoredItem item) {
  if (entries_.size() >= capacity_ || contains(item.kind, item.atom)) return false;
  item.covers = make_atom_set(std::move(item.covers));
  if (item.kind == ItemKind::atom) item.covers = {item.atom};

  AtomSet merged;
  merged.reserve(covered_.size() + item.covers.size());
  std::set_union(covered_.begin(), covered_.end(), item.covers.begin(), item.covers.end(), std::back_inserter(merged));
  covered_ = std::move(merged);

  total_bits_ += item.bits;
  fingerprint_ += mix_seed(static_cast<std::uint64_t>(item.kind) + 1, item.atom);
  entries_.push_back(std::move(item));
  return true;
}

bool StoragePlan::contains(ItemKind kind, AtomId atom) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const StoredItem& e) { return e.kind == kind && e.atom == atom; });
}

bool StoragePlan::covers(AtomId atom) const { return std::binary_search(covered_.begin(), covered_.end(), atom); }

}  // namespace derivd
