#include "report.hpp"
#include "support.hpp"

using namespace rmm;
using namespace rmm::test;

TEST_SUITE_BEGIN("cli");

TEST_CASE("report rows and verdicts for store buffering") {
  LitmusTest t = corpus_test("sb");
  MemoryModel m = resolve_model(t, "tso");
  cli::RunReport r = cli::make_report(t, run_test(t, m));
  CHECK_EQ(r.columns, std::vector<std::string>{"r0", "r1", "p", "q"});
  REQUIRE_EQ(r.outcomes.size(), 4);
  bool ff = false;
  for (const cli::OutcomeRow& row : r.outcomes)
    if (row.values[0] == "false" && row.values[1] == "false") {
      ff = true;
      CHECK_EQ(row.matches, std::vector<std::size_t>{0});
    }
  CHECK(ff);
  CHECK(std::is_sorted(r.outcomes.begin(), r.outcomes.end(),
                       [](const cli::OutcomeRow& a, const cli::OutcomeRow& b) { return a.values < b.values; }));
  CHECK_EQ(cli::exit_code({r.run}), 0);
}

TEST_CASE("json report is schema-tagged and free of timing") {
  LitmusTest t = corpus_test("sb");
  MemoryModel m = resolve_model(t, "sc");
  cli::RunReport r = cli::make_report(t, run_test(t, m));
  nlohmann::ordered_json j = cli::to_json(r, m);
  CHECK_EQ(j["schema"], "rmm-report/1");
  CHECK_EQ(j["test"], "sb");
  CHECK_EQ(j["model"], "sc");
  std::string text = j.dump();
  CHECK(text.find("elapsed") == std::string::npos);
  CHECK_EQ(text, cli::to_json(cli::make_report(t, run_test(t, m)), m).dump());
  CHECK_FALSE(cli::to_text(r, m).empty());
}

TEST_CASE("exit codes combine runs") {
  LitmusTest t = corpus_test("sb");
  t.assertions[0].models.clear();
  TestRun fail = run_test(t, resolve_model(t, "sc"));
  LitmusTest ok = corpus_test("seq_ww");
  TestRun pass = run_test(ok, resolve_model(ok));
  ExploreOptions tiny;
  tiny.max_states = 3;
  TestRun cut = run_test(ok, resolve_model(ok), tiny);
  CHECK_EQ(cli::exit_code({pass}), 0);
  CHECK_EQ(cli::exit_code({pass, fail}), 1);
  CHECK_EQ(cli::exit_code({pass, cut}), 2);
}

TEST_CASE("model descriptions from json") {
  MemoryModel m = cli::model_from_json(nlohmann::json::parse(
      R"({"name": "mine", "base": "tso", "relax": {"ww": true}, "grain": [[0, 1]], "barriers": ["wr", "ww"]})"));
  CHECK_EQ(m.name, "mine");
  CHECK(m.relax_wr);
  CHECK(m.relax_ww);
  CHECK(m.grain.kind == WriteGrain::Kind::kExplicit);
  CHECK(grain_allows(m, threads({0, 1})));
  CHECK(m.knows_barrier("ww"));
  CHECK_THROWS_AS(cli::model_from_json(nlohmann::json::parse(R"({"base": "nope"})")), ModelError);
  CHECK_THROWS_AS(cli::model_from_json(nlohmann::json::parse(R"({"grain": "some"})")), ModelError);
  CHECK_THROWS_AS(cli::model_from_json(nlohmann::json::parse(R"({"barriers": ["mfence"]})")), ModelError);
}

TEST_CASE("value text") {
  CHECK_EQ(cli::value_text(Expr::tt()), "true");
  CHECK_EQ(cli::value_text(Expr::unit()), "()");
}

TEST_SUITE_END();
