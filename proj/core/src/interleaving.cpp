#include "rmm/interleaving.hpp"

#include <set>
#include <unordered_set>

#include "rmm/canonical.hpp"

namespace rmm {

namespace {

RefName fresh_location(const Store& s, ThreadId t) {
  for (int k = 0;; ++k) {
    RefName r{"@" + std::to_string(t.value) + "." + std::to_string(k)};
    if (!s.contains(r)) return r;
  }
}

std::string state_key(const ScState& st) {
  CanonicalWriter w;
  for (const auto& e : st.threads) {
    w.expr(e);
    w.token('|');
  }
  // Thread expressions come first so every reachable allocated location is
  // numbered before the store is written.
  for (const auto& [name, value] : st.store) {
    w.ref(name);
    w.token('=');
    w.expr(value);
    w.token(';');
  }
  return w.str();
}

}  // namespace

ScStepResult sc_step(const Store& store, const ThreadPool& threads) {
  using K = Expr::Kind;
  ScStepResult result;
  for (std::size_t i = 0; i < threads.size(); ++i) {
    ThreadId t{static_cast<int>(i)};
    Decomposition d = decompose(threads[i]);
    if (d.kind == Decomposition::Kind::kValue) continue;
    if (d.kind == Decomposition::Kind::kBlocked) {
      result.diagnostics.push_back(to_string(t) + ": stuck (" + to_string(d.reason) + ")");
      continue;
    }
    const Expr& r = d.focus;
    ScState next{store, threads};
    Expr replacement;
    switch (r.kind()) {
      case K::kApp:
        replacement = subst_var(r.fun().body(), r.fun().param(), r.arg());
        break;
      case K::kIf:
        replacement = r.cond().kind() == K::kTrue ? r.then_branch() : r.else_branch();
        break;
      case K::kRefNew: {
        RefName p = fresh_location(store, t);
        next.store.insert_or_assign(p, r.init());
        replacement = Expr::ref(p);
        break;
      }
      case K::kDeref: {
        auto it = store.find(r.target().ref_name());
        if (r.target().kind() != K::kRef || it == store.end()) {
          result.diagnostics.push_back(to_string(t) + ": dangling reference " + to_string(r.target()));
          continue;
        }
        replacement = it->second;
        break;
      }
      case K::kAssign: {
        if (r.target().kind() != K::kRef || !store.contains(r.target().ref_name())) {
          result.diagnostics.push_back(to_string(t) + ": dangling reference " + to_string(r.target()));
          continue;
        }
        next.store.insert_or_assign(r.target().ref_name(), r.value());
        replacement = Expr::unit();
        break;
      }
      case K::kBarrier:
        replacement = Expr::unit();
        break;
      default:
        continue;
    }
    next.threads[i] = plug(d.context, std::move(replacement));
    result.successors.push_back({t, std::move(next)});
  }
  return result;
}

ScExploreResult sc_explore(const Store& initial, const ThreadPool& threads,
                           const ScLimits& limits) {
  ScExploreResult result;
  std::unordered_set<std::string> visited;
  std::set<std::string> diagnostics;
  std::vector<ScState> frontier{ScState{initial, threads}};
  visited.insert(state_key(frontier.front()));
  std::size_t depth = 0;
  while (!frontier.empty()) {
    if (depth++ > limits.max_depth) {
      result.exhaustive = false;
      result.truncation = "depth limit";
      break;
    }
    std::vector<ScState> next;
    for (const ScState& st : frontier) {
      bool finished = true;
      for (const auto& e : st.threads) finished = finished && e.is_value();
      if (finished) {
        result.outcomes.insert(st.store);
        continue;
      }
      ScStepResult step = sc_step(st.store, st.threads);
      diagnostics.insert(step.diagnostics.begin(), step.diagnostics.end());
      for (auto& s : step.successors) {
        if (visited.insert(state_key(s.state)).second) next.push_back(std::move(s.state));
      }
    }
    if (visited.size() > limits.max_states) {
      result.exhaustive = false;
      result.truncation = "state limit";
      break;
    }
    frontier = std::move(next);
  }
  result.states_visited = visited.size();
  result.diagnostics.assign(diagnostics.begin(), diagnostics.end());
  return result;
}

}  // namespace rmm
