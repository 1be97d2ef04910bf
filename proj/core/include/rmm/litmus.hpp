#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rmm/explorer.hpp"
#include "rmm/model.hpp"
#include "rmm/surface.hpp"

namespace rmm {

/// Boolean formula over final stores: equalities joined by /\ and \/.
struct Predicate {
  enum class Kind { kEq, kAnd, kOr };
  Kind kind = Kind::kEq;
  std::string name;  // kEq
  Expr literal;      // kEq
  std::vector<Predicate> kids;
  int line = 0;

  bool eval(const Store& s) const;
  /// Every name the predicate mentions.
  std::vector<std::string> names() const;
  friend bool operator==(const Predicate& a, const Predicate& b);
};

std::string to_string(const Predicate& p);
Predicate parse_predicate(TokenCursor& in);
Predicate parse_predicate(std::string_view text);

enum class AssertionMode { kExists, kForbidden };

struct Assertion {
  AssertionMode mode = AssertionMode::kExists;
  Predicate pred;
  /// Models the assertion is stated for; empty means every model.
  std::vector<std::string> models;
  int line = 0;

  bool applies_to(std::string_view model) const;
  friend bool operator==(const Assertion& a, const Assertion& b) {
    return a.mode == b.mode && a.pred == b.pred && a.models == b.models;
  }
};

std::string to_string(const Assertion& a);

/// Header settings that adjust whichever model the test runs under.
struct ModelOverrides {
  std::optional<WriteGrain::Kind> grain;
  std::optional<bool> coherence_rr;
  std::optional<bool> strict_precedence;
  friend bool operator==(const ModelOverrides&, const ModelOverrides&) = default;
};

void apply_overrides(MemoryModel& m, const ModelOverrides& o);

struct LitmusThread {
  std::string name;
  SurfacePtr body;
  Expr program;  // desugared body
};

struct LitmusTest {
  std::string name;
  std::string model;
  ModelOverrides overrides;
  std::vector<std::pair<std::string, Expr>> shared;  // declaration order
  std::vector<std::string> regs;
  std::vector<LitmusThread> threads;
  std::vector<Assertion> assertions;
  /// Register lint findings reported as warnings (lenient parsing only).
  std::vector<std::string> warnings;
  /// Registers are written by one thread and read by no other, so the
  /// register visibility restriction is sound.
  bool registers_private = true;

  /// Header model followed by every model named in assertions.
  std::vector<std::string> mentioned_models() const;
  /// Barrier kinds used by the threads, sorted.
  std::vector<std::string> barrier_kinds() const;

  Store initial_store() const;
  ThreadPool thread_pool() const;
  RelaxedConfig initial_config() const { return RelaxedConfig::initial(initial_store(), thread_pool()); }
};

/// Structural equality of everything a test file states.
bool same_test(const LitmusTest& a, const LitmusTest& b);

struct ParseOptions {
  /// Register misuse is an error; otherwise a warning that disables the
  /// register visibility restriction.
  bool strict_registers = true;
};

LitmusTest parse_test(std::string_view text, const ParseOptions& opts = {});
std::string format_test(const LitmusTest& t);

/// Built-in model `name` (the header model when empty) with the test's
/// overrides applied. Throws ModelError.
MemoryModel resolve_model(const LitmusTest& t, std::string_view name = {});

/// Barrier kinds of the test that `m` does not define.
std::vector<std::string> unsupported_barriers(const LitmusTest& t, const MemoryModel& m);

enum class Verdict { kSat, kUnsat, kUnknown };
std::string to_string(Verdict v);

struct AssertionResult {
  Assertion assertion;
  /// Whether some reachable final store satisfies the predicate.
  Verdict verdict = Verdict::kUnknown;
  bool holds = false;
  std::optional<Witness> witness;
};

struct TestRun {
  std::string test;
  MemoryModel model;
  ExploreOptions options;
  ExplorationResult exploration;
  std::vector<AssertionResult> results;  // applicable assertions only

  bool inconclusive() const;
  bool all_hold() const;
};

/// Explores the test under `m` and checks every assertion that applies to
/// m.name. Witnesses are searched for satisfiable predicates when requested.
TestRun run_test(const LitmusTest& t, const MemoryModel& m, ExploreOptions opts = {}, bool witnesses = false);

/// Exploration options adjusted for the test (register restriction only when
/// its registers are private).
ExploreOptions options_for(const LitmusTest& t, ExploreOptions opts);

struct CorpusEntry {
  std::string file;
  std::string text;
};

/// The shipped litmus files, sorted by file name.
const std::vector<CorpusEntry>& corpus_sources();
std::vector<LitmusTest> builtin_corpus();
/// Throws std::out_of_range for unknown names.
LitmusTest corpus_test(std::string_view name);

}  // namespace rmm
