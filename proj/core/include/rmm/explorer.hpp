#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmm/config.hpp"
#include "rmm/model.hpp"
#include "rmm/rules.hpp"

namespace rmm {

/// 128-bit fingerprint of canonical_text(c).
struct CanonicalKey {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;
  friend bool operator==(const CanonicalKey&, const CanonicalKey&) = default;
  friend auto operator<=>(const CanonicalKey&, const CanonicalKey&) = default;
};

struct CanonicalKeyHash {
  std::size_t operator()(const CanonicalKey& k) const noexcept { return static_cast<std::size_t>(k.lo ^ (k.hi * 31)); }
};

/// Configuration text with allocated locations and identifiers renamed by
/// first occurrence (store, then temporary store, then threads) and bound
/// variables written as binder depths.
std::string canonical_text(const RelaxedConfig& c);
CanonicalKey canonicalize(const RelaxedConfig& c);
CanonicalKey fingerprint(std::string_view text);

enum class Strategy { kBruteDag, kEagerLocal, kPartitioned };

std::string to_string(Strategy s);
/// Accepts "bruteDag", "eager", "partitioned". Throws std::invalid_argument.
Strategy parse_strategy(std::string_view s);

struct ExploreOptions {
  Strategy strategy = Strategy::kEagerLocal;
  VisibilityOptions visibility{true, true};
  std::size_t max_states = 10'000'000;
  std::size_t max_depth = 10'000;
  unsigned workers = 1;
  /// Run check_invariants on every new configuration.
  bool check_invariants = false;

  /// Every transition, no R5 restriction: the baseline search.
  static ExploreOptions brute() {
    ExploreOptions o;
    o.strategy = Strategy::kBruteDag;
    o.visibility = {false, false};
    return o;
  }
};

struct ExploreStats {
  std::size_t states_visited = 0;
  std::size_t transitions = 0;
  std::size_t max_frontier = 0;
  std::size_t stuck_states = 0;
  std::chrono::duration<double> elapsed{};
};

struct ExplorationResult {
  OutcomeSet outcomes;
  bool exhaustive = true;
  std::string truncation;
  ExploreStats stats;
  /// Stuck-thread reports and invariant violations, first few only.
  std::vector<std::string> diagnostics;
  bool invariant_violated = false;
};

/// Every successor of c: local steps of each thread then enabled_global.
std::vector<std::pair<Step, RelaxedConfig>> step_all(const RelaxedConfig& c, const MemoryModel& m,
                                                     const VisibilityOptions& opts = {});

struct ClosureItem {
  RelaxedConfig config;
  std::vector<Step> path;  // local steps from the closure's source
  std::optional<CanonicalKey> key;  // filled when the closure computed it
};

struct ClosureResult {
  std::vector<ClosureItem> maximal;
  bool complete = true;  // false if a thread diverged or the limits were hit
};

/// All configurations reachable from c with local steps only that admit no
/// further local step, deduplicated, in discovery order.
ClosureResult eager_local_closure(const RelaxedConfig& c, std::size_t max_states = 1'000'000,
                                  std::size_t max_depth = 10'000);

ExplorationResult explore(const RelaxedConfig& initial, const MemoryModel& m, const ExploreOptions& opts = {});

struct Witness {
  RelaxedConfig initial;
  std::vector<Step> steps;
};

class ReplayError : public std::runtime_error {
 public:
  ReplayError(std::size_t index, const std::string& what) : std::runtime_error(what), step_index(index) {}
  std::size_t step_index;
};

/// Applies each step in turn. Throws ReplayError naming the first step whose
/// preconditions do not hold.
RelaxedConfig replay_witness(const Witness& w, const MemoryModel& m);

using StorePredicate = std::function<bool(const Store&)>;

struct WitnessSearch {
  std::optional<Witness> witness;
  /// When no witness is returned: was the search exhaustive?
  bool exhaustive = true;
  std::string truncation;
};

/// Search for a final configuration whose store satisfies `target`.
WitnessSearch find_witness(const RelaxedConfig& initial, const MemoryModel& m, const StorePredicate& target,
                           const ExploreOptions& opts = {});

/// One line per step: rule label and affected entry.
std::vector<std::string> describe_witness(const Witness& w, const MemoryModel& m);

}  // namespace rmm
