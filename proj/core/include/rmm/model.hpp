#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rmm/config.hpp"

namespace rmm {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OpClass : unsigned { kRead = 1, kReadMark = 2, kWrite = 4, kBarrier = 8 };

OpClass op_class(const MemOp& op);

/// Bit set of OpClass values.
struct OpClassSet {
  unsigned bits = 0;
  constexpr OpClassSet() = default;
  constexpr OpClassSet(std::initializer_list<OpClass> cs) {
    for (OpClass c : cs) bits |= static_cast<unsigned>(c);
  }
  bool contains(OpClass c) const { return bits & static_cast<unsigned>(c); }
  bool subset_of(OpClassSet o) const { return (bits & ~o.bits) == 0; }
};

/// Ordering constraints a barrier adds. All local rules relate operations of
/// the barrier's own thread.
struct BarrierSemantics {
  std::string name;
  /// Earlier operations of these classes precede the barrier.
  OpClassSet after;
  /// The barrier precedes later operations of these classes.
  OpClassSet before;
  /// A write by any thread whose visibility includes the barrier's thread
  /// precedes the barrier.
  bool waits_for_visible_writes = false;
  /// A read may not overtake a sequence holding this barrier when the
  /// barrier itself follows a read or read mark of the same thread.
  bool fences_reads_behind_reads = false;
};

/// Built-in barrier table: wr, ww, rr, rw, sync, lwsync.
BarrierSemantics barrier_semantics(std::string_view kind);
std::vector<std::string> standard_barrier_kinds();

/// Family of visibility sets a pending write may acquire.
struct WriteGrain {
  enum class Kind { kEmptyOnly, kOwnOnly, kAllSubsets, kExplicit };
  Kind kind = Kind::kOwnOnly;
  std::vector<ThreadSet> sets;  // kExplicit only; the empty set is implied

  static WriteGrain empty_only() { return {Kind::kEmptyOnly, {}}; }
  static WriteGrain own_only() { return {Kind::kOwnOnly, {}}; }
  static WriteGrain all_subsets() { return {Kind::kAllSubsets, {}}; }
  static WriteGrain explicit_sets(std::vector<ThreadSet> s) { return {Kind::kExplicit, std::move(s)}; }
};

std::string to_string(const WriteGrain& g);

struct MemoryModel {
  std::string name;
  // Program-order relaxations between operations of one thread.
  bool relax_wr = false;
  bool relax_ww = false;
  bool relax_rr = false;
  bool relax_rw = false;
  /// Same-location reads of one thread stay ordered.
  bool coherence_rr = false;
  /// Every pending operation precedes every later one (sequential consistency).
  bool total_order = false;
  /// Include the minimal precedence relation. Only turned off to build
  /// deliberately broken models for the axiom checker.
  bool minimal_precedence = true;
  /// A write that already served a read precedes later reads of the same
  /// location by any thread.
  bool strict_wr_read_precedence = true;
  std::map<std::string, BarrierSemantics> barriers;
  WriteGrain grain;

  const BarrierSemantics& barrier(const std::string& kind) const;
  bool knows_barrier(const std::string& kind) const { return barriers.contains(kind); }
};

/// The minimal precedence every memory model must respect.
bool min_precedes(const Entry& earlier, const Entry& later, bool strict_wr_read = true);

/// Full binary precedence of a model: minimal precedence, program order,
/// read-read coherence and barrier rules.
bool precedes(const MemoryModel& m, const Entry& earlier, const Entry& later);

/// May `cand` be performed ahead of every entry of `sigma`?
bool commutable(const MemoryModel& m, std::span<const Entry> sigma, const Entry& cand);

/// commutable() against the barriers of `sigma` only.
bool commutable_barriers_only(const MemoryModel& m, std::span<const Entry> sigma, const Entry& cand);

bool grain_allows(const MemoryModel& m, ThreadSet w);

/// sc, tso, pso, rmo, relaxed, power. Throws ModelError on unknown names.
MemoryModel builtin_model(std::string_view name);
std::vector<std::string> builtin_model_names();

std::string describe(const MemoryModel& m);

struct ValidationReport {
  std::size_t samples = 0;
  std::size_t empty_prefix_failures = 0;  // axiom (E)
  std::size_t precedence_failures = 0;    // axiom (A) for the minimal precedence
  std::vector<std::string> counterexamples;  // first few, human readable

  bool passed() const { return empty_prefix_failures == 0 && precedence_failures == 0; }
};

/// Randomized check of the two memory-model axioms over temporary stores of
/// length <= 6 built from <= 3 threads and 2 locations.
ValidationReport validate_model(const MemoryModel& m, std::size_t sample_budget,
                                std::uint64_t seed = 0x5eed);

}  // namespace rmm
