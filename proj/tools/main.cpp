#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "report.hpp"
#include "rmm/interleaving.hpp"

namespace {

using namespace rmm;
using nlohmann::ordered_json;

constexpr int kUsageError = 3;

struct Common {
  std::string file;
  std::string model;
  std::string model_config;
  std::string strategy = "eager";
  std::size_t max_states = 10'000'000;
  std::size_t max_depth = 10'000;
  unsigned workers = 1;
  bool json = false;
  bool lenient = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_file = true) {
  if (needs_file) cmd->add_option("file", c.file, "litmus test file")->required();
  cmd->add_option("--model", c.model, "memory model (default: the test's)");
  cmd->add_option("--model-config", c.model_config, "JSON model description");
  cmd->add_option("--strategy", c.strategy, "bruteDag, eager or partitioned")
      ->check(CLI::IsMember({"bruteDag", "eager", "partitioned"}));
  cmd->add_option("--max-states", c.max_states, "state limit");
  cmd->add_option("--max-depth", c.max_depth, "depth limit");
  cmd->add_option("--workers", c.workers, "parallel workers")->check(CLI::Range(1U, 256U));
  cmd->add_flag("--json", c.json, "JSON output");
  cmd->add_flag("--lenient-registers", c.lenient, "report register misuse as warnings");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LitmusTest load(const Common& c) {
  ParseOptions po;
  po.strict_registers = !c.lenient;
  try {
    return parse_test(read_file(c.file), po);
  } catch (const ParseError& e) {
    throw std::runtime_error(c.file + ":" + std::to_string(e.line) + ": " +
                             std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
  }
}

MemoryModel model_for(const LitmusTest& t, const Common& c) {
  if (!c.model_config.empty()) {
    MemoryModel m = cli::model_from_json(nlohmann::json::parse(read_file(c.model_config)));
    apply_overrides(m, t.overrides);
    return m;
  }
  return resolve_model(t, c.model);
}

ExploreOptions options(const Common& c) {
  ExploreOptions o;
  o.strategy = parse_strategy(c.strategy);
  o.max_states = c.max_states;
  o.max_depth = c.max_depth;
  o.workers = c.workers;
  return o;
}

int cmd_run(const Common& c, bool witness, bool outcomes_only) {
  LitmusTest t = load(c);
  MemoryModel m = model_for(t, c);
  TestRun run = run_test(t, m, options(c), witness);
  int code = cli::exit_code({run});
  cli::RunReport r = cli::make_report(t, std::move(run));
  if (outcomes_only) {
    if (c.json) {
      ordered_json j = cli::to_json(r, m);
      std::cout << ordered_json{{"schema", j["schema"]}, {"test", j["test"]}, {"model", j["model"]},
                                {"exhaustive", j["exhaustive"]}, {"columns", j["columns"]},
                                {"outcomes", j["outcomes"]}}
                       .dump(2)
                << "\n";
    } else {
      for (const auto& row : r.outcomes) {
        for (std::size_t i = 0; i < row.values.size(); ++i)
          std::cout << (i ? " " : "") << r.columns[i] << "=" << row.values[i];
        std::cout << "\n";
      }
      if (!r.run.exploration.exhaustive) std::cout << "(truncated: " << r.run.exploration.truncation << ")\n";
    }
    return r.run.exploration.exhaustive ? 0 : 2;
  }
  std::cout << (c.json ? cli::to_json(r, m).dump(2) + "\n" : cli::to_text(r, m));
  return code;
}

int cmd_witness(const Common& c, const std::string& outcome) {
  LitmusTest t = load(c);
  MemoryModel m = model_for(t, c);
  Predicate p;
  try {
    p = parse_predicate(outcome);
  } catch (const ParseError& e) {
    throw std::runtime_error(std::string("--outcome: ") + e.what());
  }
  if (auto missing = unsupported_barriers(t, m); !missing.empty())
    throw ModelError("model " + m.name + " does not define barrier '" + missing.front() + "'");
  ExploreOptions o = options_for(t, options(c));
  WitnessSearch w = find_witness(t.initial_config(), m, [&](const Store& s) { return p.eval(s); }, o);
  std::vector<std::string> steps = w.witness ? describe_witness(*w.witness, m) : std::vector<std::string>{};
  if (c.json) {
    ordered_json j{{"schema", "rmm-report/1"}, {"test", t.name}, {"model", m.name}, {"outcome", to_string(p)}};
    j["found"] = w.witness.has_value();
    j["exhaustive"] = w.exhaustive;
    if (w.witness) j["witness"] = steps;
    std::cout << j.dump(2) << "\n";
  } else if (w.witness) {
    std::cout << "witness for " << to_string(p) << " under " << m.name << ":\n";
    for (std::size_t i = 0; i < steps.size(); ++i) std::cout << "  " << i + 1 << ". " << steps[i] << "\n";
  } else {
    std::cout << (w.exhaustive ? "unreachable: " : "not found (truncated: " + w.truncation + "): ")
              << to_string(p) << " under " << m.name << "\n";
  }
  return w.witness ? 0 : w.exhaustive ? 1 : 2;
}

int cmd_models(const std::string& which) {
  if (!which.empty()) {
    std::cout << describe(builtin_model(which));
    return 0;
  }
  for (const std::string& n : builtin_model_names()) std::cout << n << "\n";
  return 0;
}

int cmd_corpus(const Common& c, bool run_all) {
  std::vector<TestRun> runs;
  ordered_json reports = ordered_json::array();
  std::size_t passed = 0;
  for (const LitmusTest& t : builtin_corpus()) {
    std::vector<std::string> models = run_all ? t.mentioned_models() : std::vector<std::string>{t.model};
    for (const std::string& name : models) {
      MemoryModel m = resolve_model(t, name);
      TestRun run = run_test(t, m, options(c));
      const bool ok = run.all_hold() && !run.inconclusive();
      passed += ok;
      if (!c.json)
        std::cout << (ok ? "ok   " : "FAIL ") << t.name << " under " << name << " (" << run.results.size()
                  << " assertions, " << run.exploration.stats.states_visited << " states)\n";
      cli::RunReport r = cli::make_report(t, run);
      if (c.json) reports.push_back(cli::to_json(r, m));
      runs.push_back(std::move(run));
    }
  }
  if (c.json) {
    ordered_json j{{"schema", "rmm-report/1"}, {"runs", runs.size()}, {"passed", passed}, {"reports", reports}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << passed << "/" << runs.size() << " runs reproduce their recorded verdicts\n";
  }
  return cli::exit_code(runs);
}

int cmd_oracle(const Common& c) {
  LitmusTest t = load(c);
  ScLimits lim{c.max_states, c.max_depth};
  ScExploreResult r = sc_explore(t.initial_store(), t.thread_pool(), lim);
  std::vector<std::string> cols = t.regs;
  for (const auto& [n, v] : t.shared) cols.push_back(n);
  std::set<std::vector<std::string>> rows;
  for (const Store& s : r.outcomes.stores()) {
    std::vector<std::string> row;
    for (const std::string& col : cols) {
      auto it = s.find(RefName{col});
      row.push_back(it == s.end() ? "?" : cli::value_text(it->second));
    }
    rows.insert(row);
  }
  if (c.json) {
    ordered_json out = ordered_json::array();
    for (const auto& row : rows) {
      ordered_json jr;
      for (std::size_t i = 0; i < cols.size(); ++i) jr[cols[i]] = row[i];
      out.push_back(jr);
    }
    std::cout << ordered_json{{"schema", "rmm-report/1"}, {"test", t.name}, {"semantics", "interleaving"},
                              {"exhaustive", r.exhaustive}, {"states_visited", r.states_visited},
                              {"outcomes", out}}
                     .dump(2)
              << "\n";
  } else {
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? " " : "") << cols[i] << "=" << row[i];
      std::cout << "\n";
    }
    std::cout << rows.size() << " outcomes, " << r.states_visited << " states"
              << (r.exhaustive ? "" : " (truncated: " + r.truncation + ")") << "\n";
    for (const std::string& d : r.diagnostics) std::cout << "note: " << d << "\n";
  }
  return r.exhaustive ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rmm: explore relaxed memory semantics of litmus tests"};
  app.require_subcommand(1);
  Common common;
  bool witness = false;
  bool run_all = false;
  std::string outcome;
  std::string describe_name;

  CLI::App* run = app.add_subcommand("run", "explore a test and check its assertions");
  add_common(run, common);
  run->add_flag("--witness", witness, "print a trace for each satisfiable assertion");
  CLI::App* outcomes = app.add_subcommand("outcomes", "list reachable final valuations");
  add_common(outcomes, common);
  CLI::App* wit = app.add_subcommand("witness", "find a trace reaching an outcome");
  add_common(wit, common);
  wit->add_option("--outcome", outcome, "predicate, e.g. \"r0 = false /\\ r1 = false\"")->required();
  CLI::App* models = app.add_subcommand("models", "list built-in models");
  models->add_option("--describe", describe_name, "show one model's definition");
  CLI::App* corpus = app.add_subcommand("corpus", "run the built-in litmus corpus");
  add_common(corpus, common, false);
  corpus->add_flag("--run-all", run_all, "also run every model named in assertions");
  CLI::App* oracle = app.add_subcommand("oracle", "run the interleaving reference semantics");
  add_common(oracle, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*run) return cmd_run(common, witness, false);
    if (*outcomes) return cmd_run(common, false, true);
    if (*wit) return cmd_witness(common, outcome);
    if (*models) return cmd_models(describe_name);
    if (*corpus) return cmd_corpus(common, run_all);
    if (*oracle) return cmd_oracle(common);
  } catch (const std::exception& e) {
    std::cerr << "rmm: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}
