#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "derivd/kb.hpp"

namespace derivd {

enum class ItemKind : std::uint8_t { atom, answer };

/// One stored unit. An atom entry covers itself; an answer entry materializes
/// a query's whole proof and covers every atom on it.
struct StoredItem {
  ItemKind kind = ItemKind::atom;
  AtomId atom = 0;
  double bits = 0.0;
  AtomSet covers;
};

/// Set of precomputed items with bit accounting.
class StoragePlan {
 public:
  static constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

  explicit StoragePlan(std::size_t capacity = kUnlimited) : capacity_(capacity) {}

  /// Returns false when the plan is full or already holds the item.
  bool add(StoredItem item);

  bool contains(ItemKind kind, AtomId atom) const;
  bool covers(AtomId atom) const;

  std::span<const StoredItem> entries() const { return entries_; }
  const AtomSet& covered_atoms() const { return covered_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t capacity() const { return capacity_; }
  double total_bits() const { return total_bits_; }
  /// Order-independent hash of the stored (kind, atom) pairs.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  std::size_t capacity_;
  std::vector<StoredItem> entries_;
  AtomSet covered_;
  double total_bits_ = 0.0;
  std::uint64_t fingerprint_ = 0;
};

}  // namespace derivd
