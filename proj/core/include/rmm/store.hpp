#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <utility>
#include <string>
#include <vector>

#include "rmm/names.hpp"
#include "rmm/term.hpp"

namespace rmm {

/// Shared memory: location -> stored (identifier-free) value, ordered by
/// location name. Copies share their contents; every update copies.
class Store {
 public:
  using value_type = std::pair<RefName, Expr>;
  using const_iterator = std::vector<value_type>::const_iterator;

  Store() = default;
  Store(std::initializer_list<value_type> init);

  const_iterator begin() const { return items().begin(); }
  const_iterator end() const { return items().end(); }
  std::size_t size() const { return items().size(); }
  bool empty() const { return items().empty(); }

  const_iterator find(const RefName& r) const;
  bool contains(const RefName& r) const { return find(r) != end(); }
  /// Throws std::out_of_range.
  const Expr& at(const RefName& r) const;

  /// Inserts unless the location is present.
  std::pair<const_iterator, bool> emplace(RefName r, Expr v);
  void insert_or_assign(RefName r, Expr v);

  /// No allocated location as key or inside a value, and every value is
  /// closed and identifier-free.
  bool is_ground() const { return !data_ || data_->ground; }
  /// Memo slot for the canonical digest of a ground store; 0 when unset.
  std::uint64_t digest() const { return data_ ? data_->digest.load(std::memory_order_relaxed) : 0; }
  void set_digest(std::uint64_t d) const {
    if (data_) data_->digest.store(d, std::memory_order_relaxed);
  }

  friend bool operator==(const Store& a, const Store& b);

 private:
  struct Data {
    std::vector<value_type> items;
    bool ground = true;
    mutable std::atomic<std::uint64_t> digest{0};
  };

  const std::vector<value_type>& items() const;
  void commit(std::vector<value_type> items);
  std::shared_ptr<const Data> data_;
};

/// Thread pool indexed by ThreadId::value.
using ThreadPool = std::vector<Expr>;

bool store_is_pure(const Store& s);

/// Store with run-time allocated locations renamed "@0", "@1", ... in order
/// of first reachability from the declared locations.
Store canonical_store(const Store& s);

/// Deterministic text form of canonical_store(s); equal iff the stores are
/// equal up to renaming of allocated locations and alpha-conversion.
std::string store_key(const Store& s);

std::string to_string(const Store& s);

/// Set of final stores, identified up to renaming of allocated locations and
/// iterated in canonical order.
class OutcomeSet {
 public:
  /// Returns true if the store was not already present.
  bool insert(const Store& s);
  bool contains(const Store& s) const { return items_.contains(store_key(s)); }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  void merge(const OutcomeSet& other);

  std::vector<Store> stores() const;
  std::vector<std::string> keys() const;

  friend bool operator==(const OutcomeSet& a, const OutcomeSet& b) { return a.items_ == b.items_; }

  /// True if every outcome here is also in `other`.
  bool subset_of(const OutcomeSet& other) const;

 private:
  std::map<std::string, Store> items_;
};

}  // namespace rmm
