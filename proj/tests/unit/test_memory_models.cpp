#include "support.hpp"

using namespace rmm;
using namespace rmm::test;

namespace {

// Random temporary store over threads 0..2 and locations p, q.
TemporaryStore random_temp(std::mt19937_64& rng, std::size_t len, const std::vector<std::string>& barriers) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  TemporaryStore out;
  int next_ident = 0;
  for (std::size_t i = 0; i < len; ++i) {
    int t = pick(3);
    Expr target = loc(pick(2) ? "p" : "q");
    switch (pick(4)) {
      case 0:
        out.push_back(rd(t, target, id(t, next_ident++)));
        break;
      case 1:
        out.push_back(mark(t, id(t, next_ident++)));
        break;
      case 2: {
        std::vector<IdentName> served;
        if (pick(3) == 0) served.push_back(id(pick(3), 50 + pick(3)));
        out.push_back(wr(t, target, Expr::tt(), ThreadSet(rng() & 7), served));
        break;
      }
      default:
        out.push_back(bar(t, barriers[pick(static_cast<int>(barriers.size()))]));
        break;
    }
  }
  return out;
}

Entry random_candidate(std::mt19937_64& rng) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  int t = pick(3);
  Expr target = loc(pick(2) ? "p" : "q");
  switch (pick(3)) {
    case 0:
      return rd(t, target, id(t, 90));
    case 1:
      return mark(t, id(t, 90));
    default:
      return wr(t, target, Expr::ff(), ThreadSet(rng() & 7));
  }
}

}  // namespace

TEST_SUITE_BEGIN("memory_models");

TEST_CASE("min_precedes keeps a thread's write ahead of its read of the same location") {
  CHECK(min_precedes(wr(0, loc("p"), Expr::tt()), rd(0, loc("p"), id(0, 0))));
  CHECK_FALSE(min_precedes(wr(0, loc("p"), Expr::tt()), rd(0, loc("q"), id(0, 0))));
  CHECK_FALSE(min_precedes(wr(0, loc("p"), Expr::tt()), rd(1, loc("p"), id(1, 0))));
  CHECK(min_precedes(wr(0, loc("p"), Expr::tt(), threads({0, 1})), rd(1, loc("p"), id(1, 0))));
}

TEST_CASE("min_precedes orders same-location writes") {
  CHECK(min_precedes(wr(0, loc("p"), Expr::tt()), wr(0, loc("p"), Expr::ff())));
  CHECK_FALSE(min_precedes(wr(0, loc("p"), Expr::tt()), wr(0, loc("q"), Expr::ff())));
  CHECK_FALSE(min_precedes(wr(0, loc("p"), Expr::tt()), wr(1, loc("p"), Expr::ff())));
  CHECK(min_precedes(wr(0, loc("p"), Expr::tt(), {}, {id(2, 0)}), wr(1, loc("p"), Expr::ff(), {}, {id(2, 1)})));
}

TEST_CASE("min_precedes treats an unresolved target as aliasing everything") {
  CHECK(min_precedes(wr(0, idv(0, 0), Expr::tt()), rd(0, loc("q"), id(0, 1))));
  CHECK(min_precedes(rd(0, idv(0, 0), id(0, 1)), wr(0, loc("q"), Expr::tt())));
}

TEST_CASE("min_precedes: marks and read-before-write") {
  CHECK(min_precedes(wr(0, loc("p"), Expr::tt(), {}, {id(1, 0)}), mark(1, id(1, 0))));
  CHECK_FALSE(min_precedes(wr(0, loc("p"), Expr::tt(), {}, {id(1, 1)}), mark(1, id(1, 0))));
  CHECK(min_precedes(rd(0, loc("p"), id(0, 0)), wr(0, loc("p"), Expr::tt())));
  CHECK_FALSE(min_precedes(rd(0, loc("p"), id(0, 0)), wr(1, loc("p"), Expr::tt())));
  CHECK_FALSE(min_precedes(mark(0, id(0, 0)), wr(0, loc("p"), Expr::tt())));
}

TEST_CASE("the strict reading lets a serving write block foreign reads") {
  Entry w = wr(0, loc("p"), Expr::tt(), {}, {id(2, 0)});
  Entry r = rd(1, loc("p"), id(1, 0));
  CHECK(min_precedes(w, r, true));
  CHECK_FALSE(min_precedes(w, r, false));
}

TEST_CASE("commutable on the empty prefix holds for every model") {
  std::mt19937_64 rng(1);
  for (const std::string& name : builtin_model_names()) {
    MemoryModel m = builtin_model(name);
    for (int i = 0; i < 50; ++i) {
      CHECK(commutable(m, {}, random_candidate(rng)));
      CHECK(commutable_barriers_only(m, {}, random_candidate(rng)));
    }
  }
}

TEST_CASE("sc commutes with nothing") {
  MemoryModel sc = builtin_model("sc");
  TemporaryStore sigma{wr(1, loc("q"), Expr::tt())};
  CHECK_FALSE(commutable(sc, sigma, rd(0, loc("p"), id(0, 0))));
  CHECK(commutable(builtin_model("relaxed"), sigma, rd(0, loc("p"), id(0, 0))));
}

TEST_CASE("tso relaxes only write-to-read order") {
  MemoryModel tso = builtin_model("tso");
  CHECK(commutable(tso, TemporaryStore{wr(0, loc("p"), Expr::tt())}, rd(0, loc("q"), id(0, 0))));
  CHECK_FALSE(commutable(tso, TemporaryStore{wr(0, loc("p"), Expr::tt())}, wr(0, loc("q"), Expr::tt())));
  CHECK_FALSE(commutable(tso, TemporaryStore{rd(0, loc("p"), id(0, 0))}, rd(0, loc("q"), id(0, 1))));
  CHECK(commutable(builtin_model("pso"), TemporaryStore{wr(0, loc("p"), Expr::tt())}, wr(0, loc("q"), Expr::tt())));
  CHECK(commutable(builtin_model("rmo"), TemporaryStore{rd(0, loc("p"), id(0, 0))}, rd(0, loc("q"), id(0, 1))));
}

TEST_CASE("read-read coherence is a switch") {
  MemoryModel m = builtin_model("relaxed");
  TemporaryStore sigma{rd(0, loc("p"), id(0, 0))};
  Entry later = rd(0, loc("p"), id(0, 1));
  m.coherence_rr = false;
  CHECK(commutable(m, sigma, later));
  m.coherence_rr = true;
  CHECK_FALSE(commutable(m, sigma, later));
  CHECK(commutable(m, sigma, rd(0, loc("q"), id(0, 1))));
}

TEST_CASE("lwsync keeps a read behind an earlier read of its thread") {
  MemoryModel power = builtin_model("power");
  TemporaryStore marked{mark(0, id(0, 0)), bar(0, "lwsync")};
  CHECK_FALSE(commutable(power, marked, rd(0, loc("p"), id(0, 1))));
  TemporaryStore bare{bar(0, "lwsync")};
  CHECK(commutable(power, bare, rd(0, loc("p"), id(0, 1))));
  CHECK_FALSE(commutable(power, bare, wr(0, loc("p"), Expr::tt())));
}

TEST_CASE("sync waits for writes visible to its thread") {
  MemoryModel power = builtin_model("power");
  CHECK(precedes(power, wr(1, loc("p"), Expr::tt(), threads({0, 1})), bar(0, "sync")));
  CHECK_FALSE(precedes(power, wr(1, loc("p"), Expr::tt(), threads({1})), bar(0, "sync")));
  CHECK(precedes(power, bar(0, "sync"), rd(0, loc("p"), id(0, 0))));
  CHECK_FALSE(precedes(power, bar(0, "sync"), rd(1, loc("p"), id(1, 0))));
}

TEST_CASE("commutable_barriers_only looks at barriers alone") {
  MemoryModel tso = builtin_model("tso");
  TemporaryStore writes{wr(0, loc("p"), Expr::tt()), wr(1, loc("q"), Expr::tt())};
  CHECK(commutable_barriers_only(tso, writes, rd(0, loc("p"), id(0, 0))));
  TemporaryStore own{bar(0, "wr")};
  CHECK_FALSE(commutable_barriers_only(tso, own, rd(0, loc("p"), id(0, 0))));
  TemporaryStore foreign{bar(1, "wr")};
  CHECK(commutable_barriers_only(tso, foreign, rd(0, loc("p"), id(0, 0))));
}

TEST_CASE("unknown barriers are configuration errors") {
  MemoryModel power = builtin_model("power");
  TemporaryStore sigma{bar(0, "wr")};
  CHECK_THROWS_AS(commutable(power, sigma, rd(0, loc("p"), id(0, 0))), ModelError);
  CHECK_THROWS_AS(barrier_semantics("mfence"), ModelError);
  CHECK_THROWS_AS(power.barrier("ww"), ModelError);
}

TEST_CASE("grain membership") {
  MemoryModel m = builtin_model("relaxed");
  m.grain = WriteGrain::empty_only();
  CHECK(grain_allows(m, {}));
  CHECK_FALSE(grain_allows(m, threads({0})));
  m.grain = WriteGrain::own_only();
  CHECK(grain_allows(m, threads({0})));
  CHECK_FALSE(grain_allows(m, threads({0, 1})));
  m.grain = WriteGrain::all_subsets();
  CHECK(grain_allows(m, threads({0, 1, 5})));
  m.grain = WriteGrain::explicit_sets({threads({0, 2})});
  CHECK(grain_allows(m, {}));
  CHECK(grain_allows(m, threads({0, 2})));
  CHECK_FALSE(grain_allows(m, threads({0})));
}

TEST_CASE("built-in models") {
  std::vector<std::string> names = builtin_model_names();
  CHECK_EQ(names, std::vector<std::string>{"sc", "tso", "pso", "rmo", "relaxed", "power"});
  MemoryModel tso = builtin_model("tso");
  CHECK(tso.relax_wr);
  CHECK_FALSE(tso.relax_ww);
  CHECK(tso.grain.kind == WriteGrain::Kind::kOwnOnly);
  CHECK(tso.knows_barrier("wr"));
  CHECK_FALSE(tso.knows_barrier("ww"));
  MemoryModel rmo = builtin_model("rmo");
  CHECK((rmo.relax_wr && rmo.relax_ww && rmo.relax_rr && rmo.relax_rw));
  CHECK_FALSE(rmo.coherence_rr);
  MemoryModel power = builtin_model("power");
  CHECK(power.grain.kind == WriteGrain::Kind::kAllSubsets);
  CHECK_EQ(power.barriers.size(), 2);
  CHECK_EQ(builtin_model("relaxed").barriers.size(), 6);
  CHECK(builtin_model("sc").total_order);
  CHECK_THROWS_AS(builtin_model("x86"), ModelError);
  CHECK_FALSE(describe(power).empty());
}

TEST_CASE("barrier table") {
  BarrierSemantics wr_ = barrier_semantics("wr");
  CHECK(wr_.after.contains(OpClass::kWrite));
  CHECK(wr_.before.contains(OpClass::kRead));
  CHECK_FALSE(wr_.before.contains(OpClass::kWrite));
  BarrierSemantics rr = barrier_semantics("rr");
  CHECK(rr.after.contains(OpClass::kReadMark));
  BarrierSemantics sync = barrier_semantics("sync");
  CHECK(sync.waits_for_visible_writes);
  BarrierSemantics lw = barrier_semantics("lwsync");
  CHECK(lw.waits_for_visible_writes);
  CHECK(lw.fences_reads_behind_reads);
  CHECK(lw.after.subset_of(sync.after));
  CHECK(lw.before.subset_of(sync.before));
}

TEST_CASE("validate_model accepts the built-in models") {
  for (const std::string& name : builtin_model_names()) {
    ValidationReport r = validate_model(builtin_model(name), 1500);
    CHECK_MESSAGE(r.passed(), name);
    CHECK_EQ(r.samples, 1500);
  }
}

TEST_CASE("validate_model finds a counterexample for a model that commutes everything") {
  MemoryModel m = builtin_model("relaxed");
  m.name = "anything-goes";
  m.minimal_precedence = false;
  m.barriers.clear();
  ValidationReport r = validate_model(m, 2000);
  CHECK_FALSE(r.passed());
  CHECK(r.precedence_failures > 0);
  CHECK_EQ(r.empty_prefix_failures, 0);
  CHECK_FALSE(r.counterexamples.empty());
}

TEST_CASE("property: local barriers of other threads do not matter") {
  std::mt19937_64 rng(5);
  const std::vector<std::string> local{"wr", "ww", "rr", "rw"};
  MemoryModel rmo = builtin_model("rmo");
  for (int i = 0; i < 3000; ++i) {
    TemporaryStore sigma = random_temp(rng, 1 + rng() % 6, local);
    Entry cand = random_candidate(rng);
    TemporaryStore kept;
    for (const Entry& e : sigma)
      if (!e.barrier() || e.thread == cand.thread) kept.push_back(e);
    CHECK(commutable(rmo, sigma, cand) == commutable(rmo, kept, cand));
  }
}

TEST_CASE("property: sync forbids whatever lwsync forbids") {
  std::mt19937_64 rng(9);
  MemoryModel power = builtin_model("power");
  for (int i = 0; i < 3000; ++i) {
    TemporaryStore sigma = random_temp(rng, 1 + rng() % 6, {"lwsync"});
    Entry cand = random_candidate(rng);
    TemporaryStore strong = sigma;
    for (Entry& e : strong)
      if (e.barrier()) e.op = BarrierOp{"sync"};
    if (!commutable(power, sigma, cand)) CHECK_FALSE(commutable(power, strong, cand));
  }
}

TEST_CASE("property: relaxing program order only widens commutability") {
  std::mt19937_64 rng(21);
  std::vector<MemoryModel> chain;
  for (const char* n : {"sc", "tso", "pso", "rmo"}) chain.push_back(builtin_model(n));
  for (int i = 0; i < 2000; ++i) {
    TemporaryStore sigma = random_temp(rng, 1 + rng() % 5, {"wr"});
    Entry cand = random_candidate(rng);
    for (std::size_t k = 0; k + 1 < chain.size(); ++k)
      if (commutable(chain[k], sigma, cand)) CHECK(commutable(chain[k + 1], sigma, cand));
  }
}

TEST_SUITE_END();
