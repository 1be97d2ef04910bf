#include "support.hpp"

using namespace rmm;
using namespace rmm::test;

namespace {

const char* kSb = R"(test "sb"
model tso
shared p=false q=false
regs r0 r1
thread t0: { p := true; r0 := !q }
thread t1: { q := true; r1 := !p }
under tso exists r0 = false /\ r1 = false
)";

int error_line(const std::string& text, const ParseOptions& opts = {}) {
  try {
    parse_test(text, opts);
  } catch (const ParseError& e) {
    return e.line;
  }
  return 0;
}

}  // namespace

TEST_SUITE_BEGIN("litmus");

TEST_CASE("parse the store-buffering test") {
  LitmusTest t = parse_test(kSb);
  CHECK_EQ(t.name, "sb");
  CHECK_EQ(t.model, "tso");
  CHECK_EQ(t.regs, std::vector<std::string>{"r0", "r1"});
  REQUIRE_EQ(t.shared.size(), 2);
  CHECK_EQ(t.shared[0].first, "p");
  REQUIRE_EQ(t.threads.size(), 2);
  CHECK(alpha_equal(t.threads[0].program, program("p := true; r0 := !q")));
  REQUIRE_EQ(t.assertions.size(), 1);
  CHECK(t.assertions[0].mode == AssertionMode::kExists);
  CHECK(t.assertions[0].applies_to("tso"));
  CHECK_FALSE(t.assertions[0].applies_to("sc"));
  Store s = t.initial_store();
  CHECK_EQ(s.size(), 4);
  CHECK(s.find(RefName{"r0"})->first.is_register);
  CHECK_FALSE(s.find(RefName{"p"})->first.is_register);
  CHECK(t.registers_private);
}

TEST_CASE("static errors point at their line") {
  CHECK_EQ(error_line("test \"x\"\nmodel sc\nshared p=false\nthread t0: { q := true }\n"), 4);
  CHECK_EQ(error_line("test \"x\"\nmodel sc\nshared p=false\nthread t0: { p := true }\nthread t0: { p := false }\n"),
           5);
  CHECK_EQ(error_line("test \"x\"\nmodel sc\nshared p=false\nthread t0: { fence mfence }\n"), 4);
  CHECK_EQ(error_line("test \"x\"\nmodel sc\nshared p=false p=true\nthread t0: { p := true }\n"), 3);
  CHECK_EQ(error_line("test \"x\"\nmodel sc\nshared p=false\nthread t0: { p := true }\nexists z = true\n"), 5);
  CHECK_EQ(error_line("model sc\nshared p=false\nthread t0: { p := true }\n"), 1);
  CHECK_EQ(error_line("test \"x\"\nmodel sc\ngrain some\n"), 3);
  CHECK_EQ(error_line("test \"x\"\nmodel sc\nshared p=false\nthread t0: { p := true\n"), 5);
}

TEST_CASE("register misuse is an error unless lenient") {
  std::string text =
      "test \"x\"\nmodel relaxed\nshared p=false\nregs r0\n"
      "thread t0: { r0 := true }\nthread t1: { r0 := false }\n";
  CHECK(error_line(text) > 0);
  LitmusTest t = parse_test(text, ParseOptions{false});
  CHECK_FALSE(t.warnings.empty());
  CHECK_FALSE(t.registers_private);
  CHECK_FALSE(options_for(t, {}).visibility.registers_own_only);

  std::string foreign_read =
      "test \"x\"\nmodel relaxed\nshared p=false\nregs r0\n"
      "thread t0: { r0 := true }\nthread t1: { p := !r0 }\n";
  CHECK(error_line(foreign_read) > 0);
}

TEST_CASE("header overrides adjust the model") {
  LitmusTest t = parse_test(
      "test \"x\"\nmodel relaxed\ngrain own\ncoherence on\nshared p=false\nthread t0: { p := true }\n");
  MemoryModel m = resolve_model(t);
  CHECK_EQ(m.name, "relaxed");
  CHECK(m.grain.kind == WriteGrain::Kind::kOwnOnly);
  CHECK(m.coherence_rr);
  MemoryModel other = resolve_model(t, "power");
  CHECK_EQ(other.name, "power");
  CHECK(other.coherence_rr);
}

TEST_CASE("unsupported barriers are reported per model") {
  LitmusTest t = corpus_test("sb_wr");
  CHECK_EQ(t.barrier_kinds(), std::vector<std::string>{"wr"});
  CHECK(unsupported_barriers(t, builtin_model("tso")).empty());
  CHECK_EQ(unsupported_barriers(t, builtin_model("power")), std::vector<std::string>{"wr"});
  CHECK_THROWS_AS(run_test(t, resolve_model(t, "power")), ModelError);
}

TEST_CASE("predicates parse, print and evaluate") {
  Predicate p = parse_predicate("r0 = true /\\ r1 = false \\/ p = ()");
  CHECK(p.kind == Predicate::Kind::kOr);
  CHECK_EQ(parse_predicate(to_string(p)), p);
  Store s = bool_store({{"r0", true}, {"r1", false}, {"p", false}});
  CHECK(p.eval(s));
  s.insert_or_assign(RefName{"r1"}, Expr::tt());
  CHECK_FALSE(p.eval(s));
  std::vector<std::string> names = p.names();
  CHECK_EQ(names.size(), 3);
  CHECK_THROWS_AS(parse_predicate("r0 = maybe"), ParseError);
  CHECK_THROWS_AS(parse_predicate("r0 = true /\\"), ParseError);
}

TEST_CASE("format and parse round-trip the corpus") {
  for (const LitmusTest& t : builtin_corpus()) {
    std::string text = format_test(t);
    LitmusTest back = parse_test(text);
    CHECK_MESSAGE(same_test(t, back), t.name);
    CHECK_EQ(format_test(back), text);
  }
}

TEST_CASE("the corpus holds the eleven tests") {
  std::vector<std::string> names;
  for (const LitmusTest& t : builtin_corpus()) names.push_back(t.name);
  std::sort(names.begin(), names.end());
  CHECK_EQ(names, std::vector<std::string>{"corr", "corr_strict", "iriw", "iriw_lwsync_sync", "iriw_sync_sync",
                                           "own_early", "sb", "sb_wr", "seq_ww", "wrc", "wrc_lwsync"});
  CHECK_THROWS_AS(corpus_test("rwc"), std::out_of_range);
  LitmusTest seq = corpus_test("seq_ww");
  CHECK_EQ(seq.mentioned_models().size(), 6);
}

TEST_CASE("run_test verdicts on small tests") {
  LitmusTest sb = corpus_test("sb");
  TestRun tso = run_test(sb, resolve_model(sb, "tso"), {}, true);
  REQUIRE_EQ(tso.results.size(), 1);
  CHECK(tso.results[0].verdict == Verdict::kSat);
  CHECK(tso.results[0].holds);
  REQUIRE(tso.results[0].witness);
  CHECK(tso.all_hold());

  TestRun sc = run_test(sb, resolve_model(sb, "sc"));
  REQUIRE_EQ(sc.results.size(), 1);
  CHECK(sc.results[0].verdict == Verdict::kUnsat);
  CHECK(sc.results[0].holds);

  LitmusTest fenced = corpus_test("sb_wr");
  TestRun f = run_test(fenced, resolve_model(fenced, "tso"));
  CHECK(f.results[0].verdict == Verdict::kUnsat);
  CHECK(f.exploration.exhaustive);

  LitmusTest corr = corpus_test("corr");
  CHECK(run_test(corr, resolve_model(corr)).results[0].verdict == Verdict::kSat);
  LitmusTest strict = corpus_test("corr_strict");
  CHECK(run_test(strict, resolve_model(strict)).results[0].verdict == Verdict::kUnsat);
}

TEST_CASE("a failing assertion and a truncated run") {
  LitmusTest t = parse_test(kSb);
  t.assertions[0].models.clear();
  TestRun sc = run_test(t, resolve_model(t, "sc"));
  CHECK_FALSE(sc.all_hold());
  CHECK_FALSE(sc.inconclusive());

  ExploreOptions tiny;
  tiny.max_states = 5;
  LitmusTest fenced = corpus_test("sb_wr");
  TestRun cut = run_test(fenced, resolve_model(fenced, "tso"), tiny);
  CHECK(cut.inconclusive());
  CHECK(cut.results[0].verdict == Verdict::kUnknown);
}

TEST_CASE("seq_ww keeps the last write under every model") {
  LitmusTest t = corpus_test("seq_ww");
  for (const std::string& m : builtin_model_names()) {
    TestRun r = run_test(t, resolve_model(t, m));
    CHECK_MESSAGE(r.all_hold(), m);
    CHECK_EQ(r.exploration.outcomes.size(), 1);
  }
}

TEST_SUITE_END();
