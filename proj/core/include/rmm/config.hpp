#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rmm/store.hpp"

namespace rmm {

/// rd(target, ident): the read's value is still unknown and stands as `ident`.
struct ReadOp {
  Expr target;  // a location or an identifier
  IdentName ident;
  friend bool operator==(const ReadOp&, const ReadOp&) = default;
};

/// Residue of a read served early by a pending write.
struct ReadMarkOp {
  IdentName ident;
  friend bool operator==(const ReadMarkOp&, const ReadMarkOp&) = default;
};

/// wr(target, value) with visibility W and served reads I.
struct WriteOp {
  Expr target;
  Expr value;
  ThreadSet visibility;
  std::vector<IdentName> served;  // sorted, duplicate-free

  bool has_served(const IdentName& i) const;
  friend bool operator==(const WriteOp&, const WriteOp&) = default;
};

struct BarrierOp {
  BarrierKind kind;
  friend bool operator==(const BarrierOp&, const BarrierOp&) = default;
};

using MemOp = std::variant<ReadOp, ReadMarkOp, WriteOp, BarrierOp>;

/// One pending operation (t, op) of the temporary store.
struct Entry {
  ThreadId thread;
  MemOp op;

  const ReadOp* read() const { return std::get_if<ReadOp>(&op); }
  const ReadMarkOp* mark() const { return std::get_if<ReadMarkOp>(&op); }
  const WriteOp* write() const { return std::get_if<WriteOp>(&op); }
  const BarrierOp* barrier() const { return std::get_if<BarrierOp>(&op); }

  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Issued but not yet globally performed operations, in issue order.
using TemporaryStore = std::vector<Entry>;

struct RelaxedConfig {
  Store store;
  TemporaryStore temp;
  ThreadPool threads;
  /// Per-thread counter for fresh identifier and location names.
  std::vector<int> fresh;

  static RelaxedConfig initial(Store store, ThreadPool threads);

  /// All threads of the program; the "every thread" visibility.
  ThreadSet program_threads() const { return ThreadSet::first_n(static_cast<int>(threads.size())); }

  /// Empty temporary store and no identifier in the store or threads.
  bool is_normal() const;
  /// Normal and every thread has reduced to a value.
  bool is_final() const;

  friend bool operator==(const RelaxedConfig&, const RelaxedConfig&) = default;
};

Entry subst_ident(const Entry& e, const IdentName& id, const Expr& v);
TemporaryStore subst_ident(const TemporaryStore& s, const IdentName& id, const Expr& v);
ThreadPool subst_ident(const ThreadPool& t, const IdentName& id, const Expr& v);

/// Checks the structural invariants of a reachable configuration: store
/// purity, one Read/ReadMark per identifier, served-set/mark matching, and
/// that every identifier in use belongs to a pending read. Returns a
/// description of the first violation.
std::optional<std::string> check_invariants(const RelaxedConfig& c);

std::string to_string(const MemOp& op);
std::string to_string(const Entry& e);
std::string to_string(const TemporaryStore& s);
std::string to_string(const RelaxedConfig& c);

}  // namespace rmm
