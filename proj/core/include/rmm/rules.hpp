#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rmm/config.hpp"
#include "rmm/model.hpp"

namespace rmm {

enum class Rule { kLocal, kR1, kR2, kR3, kR4, kR5, kR6 };

std::string to_string(Rule r);

/// One thread-local reduction of `thread`.
struct LocalStep {
  ThreadId thread;
  friend bool operator==(const LocalStep&, const LocalStep&) = default;
};

/// One memory transition, identified by positions in the temporary store.
/// `pos` is the affected entry; R2 also uses `read_pos` (pos is then the
/// serving write); R5 carries the new visibility.
struct GlobalStep {
  Rule rule = Rule::kR1;
  std::size_t pos = 0;
  std::size_t read_pos = 0;
  ThreadSet new_visibility;
  friend bool operator==(const GlobalStep&, const GlobalStep&) = default;
};

using Step = std::variant<LocalStep, GlobalStep>;

/// Thread-local rules: beta, if, ref, deref, assignment and barrier issue.
/// Empty when the thread is a value or blocked.
std::optional<RelaxedConfig> local_step(const RelaxedConfig& c, ThreadId t);

// Memory rules. Each returns nullopt when the rule is not enabled at the
// given positions.
std::optional<RelaxedConfig> r1_perform_read(const RelaxedConfig& c, std::size_t pos, const MemoryModel& m);
std::optional<RelaxedConfig> r2_read_early(const RelaxedConfig& c, std::size_t write_pos,
                                           std::size_t read_pos, const MemoryModel& m);
std::optional<RelaxedConfig> r3_eliminate_mark(const RelaxedConfig& c, std::size_t pos, const MemoryModel& m);
std::optional<RelaxedConfig> r4_perform_write(const RelaxedConfig& c, std::size_t pos, const MemoryModel& m);
std::optional<RelaxedConfig> r5_extend_visibility(const RelaxedConfig& c, std::size_t pos, ThreadSet new_w,
                                                  const MemoryModel& m);
std::optional<RelaxedConfig> r6_perform_barrier(const RelaxedConfig& c, std::size_t pos, const MemoryModel& m);

/// Which visibility extensions the enumeration offers.
struct VisibilityOptions {
  /// Offer only the full thread set or subsets of the threads that can still
  /// observe the write: live threads and threads with a read issued after it.
  bool restrict_to_observers = false;
  /// Writes to registers only become visible to their own thread.
  bool registers_own_only = false;
};

/// Threads whose expression is not yet a value.
ThreadSet live_threads(const ThreadPool& threads);
/// Threads with a pending (unperformed) read in `sigma`.
ThreadSet reading_threads(std::span<const Entry> sigma);

/// Visibility sets R5 may move the write at `pos` to, in increasing bit order.
std::vector<ThreadSet> visibility_candidates(const RelaxedConfig& c, std::size_t pos, const MemoryModel& m,
                                             const VisibilityOptions& opts = {});

/// All enabled memory transitions in rule, position, visibility order.
std::vector<GlobalStep> enabled_global(const RelaxedConfig& c, const MemoryModel& m,
                                       const VisibilityOptions& opts = {});

std::optional<RelaxedConfig> apply_step(const RelaxedConfig& c, const Step& s, const MemoryModel& m);

/// Rule label plus the affected entry, e.g. "R2 (t2,rd(p,ι2.0)) from (t0,wr(p,true))".
std::string describe_step(const RelaxedConfig& before, const Step& s);

}  // namespace rmm
