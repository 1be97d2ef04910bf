#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rmm/store.hpp"

namespace rmm {

// Reference interleaving semantics: every memory action takes effect on the
// store immediately and barriers are no-ops. Used as an oracle.

struct ScState {
  Store store;
  ThreadPool threads;
};

struct ScSuccessor {
  ThreadId thread;
  ScState state;
};

struct ScStepResult {
  std::vector<ScSuccessor> successors;
  /// Dangling-reference and stuck-thread reports, one per offending thread.
  std::vector<std::string> diagnostics;
};

ScStepResult sc_step(const Store& store, const ThreadPool& threads);

struct ScLimits {
  std::size_t max_states = 10'000'000;
  std::size_t max_depth = 10'000;
};

struct ScExploreResult {
  OutcomeSet outcomes;
  bool exhaustive = true;
  std::string truncation;
  std::size_t states_visited = 0;
  std::vector<std::string> diagnostics;
};

ScExploreResult sc_explore(const Store& initial, const ThreadPool& threads,
                           const ScLimits& limits = {});

}  // namespace rmm
