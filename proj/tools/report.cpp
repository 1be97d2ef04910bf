#include "report.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

namespace rmm::cli {

using nlohmann::ordered_json;

std::string value_text(const Expr& v) {
  switch (v.kind()) {
    case Expr::Kind::kTrue:
      return "true";
    case Expr::Kind::kFalse:
      return "false";
    case Expr::Kind::kUnit:
      return "()";
    default:
      return to_string(v);
  }
}

RunReport make_report(const LitmusTest& t, TestRun run) {
  RunReport r;
  r.test = t.name;
  r.model = run.model.name;
  r.strategy = to_string(run.options.strategy);
  r.columns = t.regs;
  for (const auto& [n, v] : t.shared) r.columns.push_back(n);
  r.warnings = t.warnings;
  std::set<std::vector<std::string>> seen;
  for (const Store& s : run.exploration.outcomes.stores()) {
    OutcomeRow row;
    for (const std::string& c : r.columns) {
      auto it = s.find(RefName{c});
      row.values.push_back(it == s.end() ? "?" : value_text(it->second));
    }
    if (!seen.insert(row.values).second) continue;
    for (std::size_t i = 0; i < run.results.size(); ++i)
      if (run.results[i].assertion.pred.eval(s)) row.matches.push_back(i);
    r.outcomes.push_back(std::move(row));
  }
  std::sort(r.outcomes.begin(), r.outcomes.end(),
            [](const OutcomeRow& a, const OutcomeRow& b) { return a.values < b.values; });
  r.run = std::move(run);
  return r;
}

ordered_json to_json(const RunReport& r, const MemoryModel& m) {
  ordered_json j;
  j["schema"] = "rmm-report/1";
  j["test"] = r.test;
  j["model"] = r.model;
  j["strategy"] = r.strategy;
  const ExplorationResult& e = r.run.exploration;
  j["exhaustive"] = e.exhaustive;
  j["truncation"] = e.exhaustive ? ordered_json(nullptr) : ordered_json(e.truncation);
  j["stats"] = {{"states_visited", e.stats.states_visited},
                {"transitions", e.stats.transitions},
                {"max_frontier", e.stats.max_frontier},
                {"stuck_states", e.stats.stuck_states}};
  ordered_json asserts = ordered_json::array();
  for (const AssertionResult& a : r.run.results) {
    ordered_json ja;
    ja["assertion"] = to_string(a.assertion);
    ja["mode"] = a.assertion.mode == AssertionMode::kExists ? "exists" : "forbidden";
    ja["predicate"] = to_string(a.assertion.pred);
    ja["verdict"] = to_string(a.verdict);
    ja["holds"] = a.holds;
    if (a.witness) ja["witness"] = describe_witness(*a.witness, m);
    asserts.push_back(std::move(ja));
  }
  j["assertions"] = std::move(asserts);
  j["columns"] = r.columns;
  ordered_json rows = ordered_json::array();
  for (const OutcomeRow& row : r.outcomes) {
    ordered_json jr;
    for (std::size_t i = 0; i < r.columns.size(); ++i) jr["values"][r.columns[i]] = row.values[i];
    jr["matches"] = row.matches;
    rows.push_back(std::move(jr));
  }
  j["outcomes"] = std::move(rows);
  j["diagnostics"] = e.diagnostics;
  j["warnings"] = r.warnings;
  return j;
}

std::string to_text(const RunReport& r, const MemoryModel& m) {
  std::ostringstream os;
  const ExplorationResult& e = r.run.exploration;
  os << "test " << r.test << " under " << r.model << " (" << r.strategy << ")\n";
  for (const std::string& w : r.warnings) os << "warning: " << w << "\n";
  for (std::size_t i = 0; i < r.run.results.size(); ++i) {
    const AssertionResult& a = r.run.results[i];
    os << "  [" << i << "] " << to_string(a.assertion) << "  ->  " << to_string(a.verdict) << ", "
       << (a.verdict == Verdict::kUnknown ? "inconclusive" : a.holds ? "holds" : "FAILS") << "\n";
  }
  std::vector<std::size_t> width;
  for (const std::string& c : r.columns) width.push_back(std::max<std::size_t>(c.size(), 5));
  os << "outcomes (" << r.outcomes.size() << "):\n   ";
  for (std::size_t i = 0; i < r.columns.size(); ++i) os << " " << std::setw(static_cast<int>(width[i])) << r.columns[i];
  os << "\n";
  for (const OutcomeRow& row : r.outcomes) {
    os << "   ";
    for (std::size_t i = 0; i < row.values.size(); ++i)
      os << " " << std::setw(static_cast<int>(width[i])) << row.values[i];
    if (!row.matches.empty()) {
      os << "   *";
      for (std::size_t k : row.matches) os << " [" << k << "]";
    }
    os << "\n";
  }
  os << "states " << e.stats.states_visited << ", transitions " << e.stats.transitions << ", max frontier "
     << e.stats.max_frontier << ", " << std::fixed << std::setprecision(3) << e.stats.elapsed.count() << " s"
     << (e.exhaustive ? "" : "  (truncated: " + e.truncation + ")") << "\n";
  for (const std::string& d : e.diagnostics) os << "note: " << d << "\n";
  for (std::size_t i = 0; i < r.run.results.size(); ++i) {
    const AssertionResult& a = r.run.results[i];
    if (!a.witness) continue;
    os << "witness for [" << i << "]:\n";
    std::size_t n = 0;
    for (const std::string& line : describe_witness(*a.witness, m)) os << "  " << std::setw(3) << ++n << ". " << line << "\n";
  }
  return os.str();
}

int exit_code(const std::vector<TestRun>& runs) {
  bool fail = false;
  bool unknown = false;
  for (const TestRun& r : runs)
    for (const AssertionResult& a : r.results) {
      if (a.verdict == Verdict::kUnknown)
        unknown = true;
      else if (!a.holds)
        fail = true;
    }
  return fail ? 1 : unknown ? 2 : 0;
}

namespace {

ThreadSet thread_set_from(const nlohmann::json& j) {
  ThreadSet s;
  for (const auto& t : j) {
    int i = t.get<int>();
    if (i < 0 || i >= ThreadSet::kMaxThreads) throw ModelError("thread index out of range in grain");
    s = s.with(ThreadId{i});
  }
  return s;
}

}  // namespace

MemoryModel model_from_json(const nlohmann::json& j) {
  try {
    MemoryModel m = builtin_model(j.value("base", std::string("sc")));
    m.name = j.value("name", std::string("custom"));
    if (j.contains("relax")) {
      const auto& r = j.at("relax");
      m.relax_wr = r.value("wr", m.relax_wr);
      m.relax_ww = r.value("ww", m.relax_ww);
      m.relax_rr = r.value("rr", m.relax_rr);
      m.relax_rw = r.value("rw", m.relax_rw);
    }
    m.coherence_rr = j.value("coherence_rr", m.coherence_rr);
    m.total_order = j.value("total_order", m.total_order);
    m.strict_wr_read_precedence = j.value("strict_precedence", m.strict_wr_read_precedence);
    if (j.contains("grain")) {
      const auto& g = j.at("grain");
      if (g.is_string()) {
        const std::string s = g.get<std::string>();
        if (s == "own")
          m.grain = WriteGrain::own_only();
        else if (s == "all")
          m.grain = WriteGrain::all_subsets();
        else if (s == "none")
          m.grain = WriteGrain::empty_only();
        else
          throw ModelError("grain must be own, all, none or a list of thread sets");
      } else {
        std::vector<ThreadSet> sets;
        for (const auto& s : g) sets.push_back(thread_set_from(s));
        m.grain = WriteGrain::explicit_sets(std::move(sets));
      }
    }
    if (j.contains("barriers")) {
      m.barriers.clear();
      for (const auto& b : j.at("barriers")) {
        const std::string k = b.get<std::string>();
        m.barriers.emplace(k, barrier_semantics(k));
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("bad model description: ") + e.what());
  }
}

}  // namespace rmm::cli
