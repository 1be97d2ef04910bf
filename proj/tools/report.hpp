#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "rmm/litmus.hpp"

namespace rmm::cli {

/// One row of the outcome table: declared names -> value text.
struct OutcomeRow {
  std::vector<std::string> values;  // aligned with RunReport::columns
  std::vector<std::size_t> matches;  // indices of assertions satisfied
};

struct RunReport {
  std::string test;
  std::string model;
  std::string strategy;
  std::vector<std::string> columns;  // registers, then shared locations
  std::vector<OutcomeRow> outcomes;  // sorted
  TestRun run;
  std::vector<std::string> warnings;
};

RunReport make_report(const LitmusTest& t, TestRun run);

nlohmann::ordered_json to_json(const RunReport& r, const MemoryModel& m);
/// Human-readable form: verdicts, outcome table, stats and witnesses.
std::string to_text(const RunReport& r, const MemoryModel& m);

/// 0 all hold, 1 some assertion fails, 2 inconclusive.
int exit_code(const std::vector<TestRun>& runs);

/// Model from a JSON description:
///   {"name": "...", "base": "tso", "relax": {"wr": true, ...},
///    "coherence_rr": bool, "total_order": bool, "strict_precedence": bool,
///    "grain": "own" | "all" | "none" | [[0, 1], [2]], "barriers": ["wr", ...]}
/// Throws ModelError on malformed input.
MemoryModel model_from_json(const nlohmann::json& j);

std::string value_text(const Expr& v);

}  // namespace rmm::cli
