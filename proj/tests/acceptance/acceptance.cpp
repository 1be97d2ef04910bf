// Acceptance suite: one line per criterion, exit status 1 if any selected
// criterion fails. Usage: rmm_acceptance [--cli PATH] [N ...]

#include <array>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rmm/config.hpp"
#include "rmm/explorer.hpp"
#include "rmm/interleaving.hpp"
#include "rmm/litmus.hpp"
#include "rmm/model.hpp"
#include "rmm/rules.hpp"

namespace {

using namespace rmm;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[FAILED] ";
    }
    detail << what << "; ";
  }
};

std::string cli_path;

bool value_of(const Store& s, const std::string& name) { return s.at(RefName{name}).kind() == Expr::Kind::kTrue; }

/// Valuation of `names` as a string of T/F.
std::string valuation(const Store& s, const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += value_of(s, n) ? 'T' : 'F';
  return out;
}

std::set<std::string> valuations(const OutcomeSet& o, const std::vector<std::string>& names) {
  std::set<std::string> out;
  for (const Store& s : o.stores()) out.insert(valuation(s, names));
  return out;
}

std::string join(const std::set<std::string>& s) {
  std::string out = "{";
  for (const auto& x : s) out += (out.size() > 1 ? "," : "") + x;
  return out + "}";
}

StorePredicate matches(std::vector<std::string> names, std::string want) {
  return [names, want](const Store& s) { return valuation(s, names) == want; };
}

MemoryModel model_for(const LitmusTest& t, const std::string& name) {
  MemoryModel m = builtin_model(name);
  apply_overrides(m, t.overrides);
  return m;
}

enum class Reach { kReachable, kUnreachable, kUnknown };

/// Witness search with replay confirmation; unreachability needs an
/// exhaustive search.
Reach reach(const LitmusTest& t, const MemoryModel& m, const StorePredicate& target, std::string* note = nullptr) {
  WitnessSearch w = find_witness(t.initial_config(), m, target, options_for(t, {}));
  if (w.witness) {
    RelaxedConfig end = replay_witness(*w.witness, m);
    if (!end.is_final() || !target(end.store)) return Reach::kUnknown;
    if (note) *note = std::to_string(w.witness->steps.size()) + " steps";
    return Reach::kReachable;
  }
  return w.exhaustive ? Reach::kUnreachable : Reach::kUnknown;
}

const char* to_string(Reach r) {
  switch (r) {
    case Reach::kReachable:
      return "reachable";
    case Reach::kUnreachable:
      return "unreachable";
    default:
      return "unknown";
  }
}

void expect_reach(Outcome& o, const std::string& test, const std::string& model, const std::string& want_vals,
                  Reach want) {
  LitmusTest t = corpus_test(test);
  std::vector<std::string> regs = t.regs;
  Reach got = reach(t, model_for(t, model), matches(regs, want_vals));
  o.require(got == want, test + "/" + model + " " + want_vals + " " + to_string(got));
}

// ---- criteria

void c1(Outcome& o) {
  LitmusTest t = corpus_test("sb");
  const std::vector<std::string> regs{"r0", "r1"};
  ExplorationResult tso = explore(t.initial_config(), model_for(t, "tso"), options_for(t, {}));
  std::set<std::string> tso_vals = valuations(tso.outcomes, regs);
  o.require(tso.exhaustive, "tso exhaustive");
  o.require(tso.outcomes.size() == 4 && tso_vals == std::set<std::string>{"FF", "FT", "TF", "TT"},
            "tso outcomes " + join(tso_vals));
  bool pq = true;
  for (const Store& s : tso.outcomes.stores()) pq = pq && value_of(s, "p") && value_of(s, "q");
  o.require(pq, "p=q=true in every tso outcome");

  ExplorationResult sc = explore(t.initial_config(), model_for(t, "sc"), options_for(t, {}));
  std::set<std::string> sc_vals = valuations(sc.outcomes, regs);
  o.require(sc.exhaustive && sc.outcomes.size() == 3 && !sc_vals.contains("FF"), "sc outcomes " + join(sc_vals));
  ScExploreResult oracle = sc_explore(t.initial_store(), t.thread_pool());
  o.require(oracle.exhaustive && oracle.outcomes == sc.outcomes, "sc equals interleaving oracle");
}

void c2(Outcome& o) {
  LitmusTest t = corpus_test("sb_wr");
  ExplorationResult r = explore(t.initial_config(), model_for(t, "tso"), options_for(t, {}));
  std::set<std::string> vals = valuations(r.outcomes, {"r0", "r1"});
  o.require(r.exhaustive, "exhaustive (" + std::to_string(r.stats.states_visited) + " states)");
  o.require(!vals.contains("FF"), "FF absent, outcomes " + join(vals));
}

void c3(Outcome& o) {
  LitmusTest t = corpus_test("seq_ww");
  for (const std::string& name : builtin_model_names()) {
    ExplorationResult r = explore(t.initial_config(), model_for(t, name), options_for(t, {}));
    std::set<std::string> vals = valuations(r.outcomes, {"p"});
    o.require(r.exhaustive && vals == std::set<std::string>{"F"}, name + " p " + join(vals));
  }
}

void c4(Outcome& o) {
  LitmusTest off = corpus_test("corr");
  MemoryModel m_off = model_for(off, "relaxed");
  o.require(!m_off.coherence_rr, "corr runs with coherence off");
  Reach a = reach(off, m_off, matches({"r0", "r1"}, "TF"));
  o.require(a == Reach::kReachable, std::string("coherence off TF ") + to_string(a));

  LitmusTest on = corpus_test("corr_strict");
  MemoryModel m_on = model_for(on, "relaxed");
  o.require(m_on.coherence_rr, "corr_strict runs with coherence on");
  Reach b = reach(on, m_on, matches({"r0", "r1"}, "TF"));
  o.require(b == Reach::kUnreachable, std::string("coherence on TF ") + to_string(b));
}

void c5(Outcome& o) {
  LitmusTest t = corpus_test("own_early");
  MemoryModel tso = model_for(t, "tso");
  o.require(tso.grain.kind == WriteGrain::Kind::kOwnOnly && tso.relax_wr, "tso has own-only grain and W->R relaxed");
  expect_reach(o, "own_early", "tso", "TFTF", Reach::kReachable);
}

void c6(Outcome& o) {
  expect_reach(o, "iriw", "power", "TFTF", Reach::kReachable);
  expect_reach(o, "iriw", "relaxed", "TFTF", Reach::kReachable);
  for (const char* m : {"sc", "tso", "pso", "rmo"}) expect_reach(o, "iriw", m, "TFTF", Reach::kUnreachable);
  expect_reach(o, "iriw_sync_sync", "power", "TFTF", Reach::kUnreachable);
  expect_reach(o, "iriw_lwsync_sync", "power", "TFTF", Reach::kReachable);
}

void c7(Outcome& o) {
  expect_reach(o, "wrc", "power", "TTF", Reach::kReachable);
  expect_reach(o, "wrc_lwsync", "power", "TTF", Reach::kUnreachable);
}

void c8(Outcome& o) {
  for (const LitmusTest& t : builtin_corpus()) {
    MemoryModel sc = model_for(t, "sc");
    ExplorationResult r = explore(t.initial_config(), sc, options_for(t, {}));
    ScExploreResult oracle = sc_explore(t.initial_store(), t.thread_pool());
    o.require(r.exhaustive && oracle.exhaustive && r.outcomes == oracle.outcomes,
              t.name + " " + std::to_string(r.outcomes.size()) + "/" + std::to_string(oracle.outcomes.size()));
  }
}

void c9(Outcome& o) {
  constexpr std::size_t kSamples = 10'000;
  for (const std::string& name : builtin_model_names()) {
    ValidationReport r = validate_model(builtin_model(name), kSamples);
    o.require(r.samples >= kSamples && r.passed(),
              name + " " + std::to_string(r.samples) + " samples, " +
                  std::to_string(r.empty_prefix_failures + r.precedence_failures) + " counterexamples");
  }
}

// Where does entry i of the temporary store land after step s?
std::optional<std::size_t> follow(const Step& s, std::size_t i) {
  const auto* g = std::get_if<GlobalStep>(&s);
  if (!g) return i;
  switch (g->rule) {
    case Rule::kR1:
    case Rule::kR3:
    case Rule::kR4:
    case Rule::kR6:
      if (i == g->pos) return std::nullopt;
      return i < g->pos ? i : i - 1;
    default:
      return i;
  }
}

std::set<IdentName> pending_idents(const RelaxedConfig& c) {
  std::set<IdentName> out;
  for (const Entry& e : c.temp)
    if (const ReadOp* r = e.read()) out.insert(r->ident);
  return out;
}

void c10(Outcome& o) {
  constexpr std::size_t kTransitions = 10'000;
  const std::vector<std::pair<std::string, std::string>> runs{
      {"sb", "tso"},   {"sb", "relaxed"},        {"own_early", "tso"},   {"iriw", "power"},
      {"wrc", "power"}, {"wrc_lwsync", "power"}, {"iriw_lwsync_sync", "power"}, {"corr", "relaxed"},
      {"sb_wr", "rmo"}, {"seq_ww", "pso"}};
  std::mt19937_64 rng(2024);
  std::size_t transitions = 0, walks = 0;
  std::map<std::string, std::size_t> violations;
  while (transitions < kTransitions) {
    const auto& [test, model] = runs[walks++ % runs.size()];
    LitmusTest t = corpus_test(test);
    MemoryModel m = model_for(t, model);
    VisibilityOptions vis = options_for(t, {}).visibility;
    if (walks % 2) vis = {};
    RelaxedConfig c = t.initial_config();
    for (;;) {
      auto next = step_all(c, m, vis);
      if (next.empty()) {
        if (!c.is_normal()) ++violations["progress"];
        break;
      }
      const auto& [step, succ] = next[std::uniform_int_distribution<std::size_t>(0, next.size() - 1)(rng)];
      ++transitions;
      if (!store_is_pure(succ.store)) ++violations["store purity"];
      for (std::size_t i = 0; i < c.temp.size(); ++i) {
        const WriteOp* w = c.temp[i].write();
        auto j = follow(step, i);
        if (!w || !j) continue;
        const WriteOp* after = *j < succ.temp.size() ? succ.temp[*j].write() : nullptr;
        if (!after || !w->visibility.subset_of(after->visibility)) ++violations["visibility monotonicity"];
      }
      // Identifiers issued by a step are new; none already resolved comes back.
      std::set<IdentName> before = pending_idents(c), now = pending_idents(succ);
      std::size_t reads = 0;
      for (const Entry& e : succ.temp) reads += e.read() ? 1 : 0;
      if (reads != now.size()) ++violations["identifier linearity"];
      for (const IdentName& i : now)
        if (!before.contains(i) && !std::holds_alternative<LocalStep>(step)) ++violations["identifier linearity"];
      if (auto bad = check_invariants(succ)) ++violations["structural: " + bad->substr(0, 40)];
      c = succ;
    }
  }
  o.require(transitions >= kTransitions, std::to_string(transitions) + " transitions over " + std::to_string(walks) +
                                             " walks");
  for (const auto& [what, n] : violations) o.require(false, what + " x" + std::to_string(n));
  if (violations.empty()) o.require(true, "no violations");
}

void c11(Outcome& o) {
  LitmusTest t = corpus_test("sb");
  MemoryModel m = model_for(t, "relaxed");
  ExploreOptions brute = ExploreOptions::brute();
  ExploreOptions observers = brute;
  observers.visibility.restrict_to_observers = true;
  ExploreOptions registers = observers;
  registers.visibility.registers_own_only = true;
  ExploreOptions eager = registers;
  eager.strategy = Strategy::kEagerLocal;

  std::vector<ExplorationResult> rs;
  std::string counts;
  for (const ExploreOptions* opt : {&brute, &observers, &registers, &eager}) {
    rs.push_back(explore(t.initial_config(), m, *opt));
    counts += (counts.empty() ? "" : " -> ") + std::to_string(rs.back().stats.states_visited);
  }
  bool decreasing = true, equal = true;
  for (std::size_t i = 1; i < rs.size(); ++i) {
    decreasing = decreasing && rs[i].stats.states_visited < rs[i - 1].stats.states_visited;
    equal = equal && rs[i].outcomes == rs[0].outcomes && rs[i].exhaustive;
  }
  o.require(rs[0].exhaustive, "baseline exhaustive");
  o.require(decreasing, "states " + counts);
  o.require(equal, "outcome sets equal (" + std::to_string(rs[0].outcomes.size()) + ")");
  ClosureResult closure = eager_local_closure(t.initial_config());
  o.require(closure.complete && closure.maximal.size() == 20,
            std::to_string(closure.maximal.size()) + " maximal temporary stores");
}

std::pair<int, std::string> capture(const std::string& cmd) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, out};
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

void c12(Outcome& o) {
  if (cli_path.empty()) {
    o.require(false, "no --cli path given");
    return;
  }
  auto [rc1, one] = capture(cli_path + " corpus --run-all --json --workers 1");
  auto [rc8, eight] = capture(cli_path + " corpus --run-all --json --workers 8");
  o.require(rc1 == 0 && rc8 == 0, "exit codes " + std::to_string(rc1) + ", " + std::to_string(rc8));
  o.require(!one.empty() && one.find("rmm-report/1") != std::string::npos, "reports present");
  o.require(one == eight, "byte-identical (" + std::to_string(one.size()) + " bytes)");
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Outcome&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "store buffering: tso has 4 outcomes, sc has 3 equal to the interleaving oracle", c1},
      {2, "store buffering with wr fences under tso: FF unreachable, exhaustive", c2},
      {3, "sequential write-write: p=false under every built-in model", c3},
      {4, "same-location reads: TF reachable without read-read coherence, unreachable with it", c4},
      {5, "read own write early under tso: TFTF reachable", c5},
      {6, "IRIW: weak outcome per model and fence placement", c6},
      {7, "WRC: TTF reachable under power, unreachable with lwsync", c7},
      {8, "oracle equivalence of the sc model on every corpus test", c8},
      {9, "memory model axioms hold over 10000 samples per model", c9},
      {10, "structural invariants along 10000 random transitions", c10},
      {11, "optimizations shrink the SB state space and keep its outcomes", c11},
      {12, "corpus JSON identical with 1 and 8 workers", c12},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc)
      cli_path = argv[++i];
    else
      selected.insert(std::stoi(a));
  }
  int failed = 0;
  for (const Criterion& c : criteria()) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    Outcome o;
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << "  -- "
              << o.detail.str() << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
