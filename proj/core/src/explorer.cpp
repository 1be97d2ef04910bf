#include "rmm/explorer.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <deque>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "rmm/canonical.hpp"

namespace rmm {

// ---- canonical keys

namespace {

void write_entry(const Entry& e, CanonicalWriter& w) {
  w.number(static_cast<std::size_t>(e.thread.value));
  if (const ReadOp* r = e.read()) {
    w.token("R(");
    w.expr(r->target);
    w.token(',');
    w.ident(r->ident);
  } else if (const ReadMarkOp* m = e.mark()) {
    w.token("M(");
    w.ident(m->ident);
  } else if (const WriteOp* wr = e.write()) {
    w.token("W(");
    w.expr(wr->target);
    w.token(",");
    w.expr(wr->value);
    w.token(",");
    w.thread_set(wr->visibility);
    // Served identifiers form a set: known ones by canonical index, then
    // first occurrences.
    std::vector<int> known;
    std::vector<IdentName> fresh;
    for (const IdentName& i : wr->served) {
      if (w.seen(i))
        known.push_back(w.ident_index(i));
      else
        fresh.push_back(i);
    }
    std::sort(known.begin(), known.end());
    w.token('[');
    for (int k : known) {
      w.token('?');
      w.number(static_cast<std::size_t>(k));
      w.token(',');
    }
    for (const IdentName& i : fresh) w.ident(i);
    w.token(']');
  } else {
    w.token("B(");
    w.token(e.barrier()->kind);
  }
  w.token(')');
}

void write_declared(const Store& s, CanonicalWriter& w) {
  for (const auto& [name, value] : s) {
    if (name.is_dynamic()) continue;
    w.token(name.name);
    w.token('=');
    w.expr(value);
    w.token(';');
  }
}

void write_config(const RelaxedConfig& c, CanonicalWriter& w) {
  // A ground store renames nothing, so its text is memoized.
  if (c.store.is_ground()) {
    std::uint64_t d = c.store.digest();
    if (d == 0) {
      CanonicalWriter sub;
      write_declared(c.store, sub);
      d = std::hash<std::string_view>{}(sub.text()) | 1;
      c.store.set_digest(d);
    }
    w.digest(d);
  } else {
    write_declared(c.store, w);
  }
  w.token('|');
  for (const Entry& e : c.temp) write_entry(e, w);
  w.token('|');
  for (const Expr& t : c.threads) {
    w.expr(t);
    w.token(';');
  }
  w.token('|');
  auto drain = [&] {
    while (w.has_pending_ref()) {
      RefName r = w.pop_pending_ref();
      auto it = c.store.find(r);
      if (it == c.store.end()) continue;
      w.ref(r);
      w.token('=');
      w.expr(it->second);
      w.token(';');
    }
  };
  drain();
  for (const auto& [name, value] : c.store) {
    if (!name.is_dynamic() || w.seen(name)) continue;
    w.reserve(name);
    drain();
  }
}

}  // namespace

std::string canonical_text(const RelaxedConfig& c) {
  CanonicalWriter w;
  write_config(c, w);
  return w.str();
}

CanonicalKey fingerprint(std::string_view text) {
  std::uint64_t a = 0xcbf29ce484222325ULL;
  std::uint64_t b = 0x9e3779b97f4a7c15ULL ^ text.size();
  std::size_t i = 0;
  auto absorb = [&](std::uint64_t w) {
    a = (a ^ w) * 0x100000001b3ULL;
    a ^= a >> 32;
    b = (b + w) * 0xff51afd7ed558ccdULL;
    b ^= b >> 29;
  };
  for (; i + 8 <= text.size(); i += 8) {
    std::uint64_t w;
    std::memcpy(&w, text.data() + i, 8);
    absorb(w);
  }
  std::uint64_t tail = 0;
  std::memcpy(&tail, text.data() + i, text.size() - i);
  absorb(tail);
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return {mix(b), mix(a ^ (b << 1))};
}

CanonicalKey canonicalize(const RelaxedConfig& c) {
  thread_local CanonicalWriter w;
  w.reset();
  write_config(c, w);
  return fingerprint(w.text());
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kBruteDag:
      return "bruteDag";
    case Strategy::kEagerLocal:
      return "eager";
    case Strategy::kPartitioned:
      return "partitioned";
  }
  return "?";
}

Strategy parse_strategy(std::string_view s) {
  if (s == "bruteDag") return Strategy::kBruteDag;
  if (s == "eager") return Strategy::kEagerLocal;
  if (s == "partitioned") return Strategy::kPartitioned;
  throw std::invalid_argument("unknown strategy '" + std::string(s) + "'");
}

// ---- successors

std::vector<std::pair<Step, RelaxedConfig>> step_all(const RelaxedConfig& c, const MemoryModel& m,
                                                     const VisibilityOptions& opts) {
  std::vector<std::pair<Step, RelaxedConfig>> out;
  for (std::size_t t = 0; t < c.threads.size(); ++t) {
    LocalStep s{ThreadId{static_cast<int>(t)}};
    if (auto n = local_step(c, s.thread)) out.emplace_back(s, std::move(*n));
  }
  for (const GlobalStep& g : enabled_global(c, m, opts))
    if (auto n = apply_step(c, g, m)) out.emplace_back(g, std::move(*n));
  return out;
}

namespace {

bool is_memory_redex(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::kRefNew:
    case Expr::Kind::kDeref:
    case Expr::Kind::kAssign:
    case Expr::Kind::kBarrier:
      return true;
    default:
      return false;
  }
}

// Applies beta and if steps of every thread until each thread is a value,
// blocked, or about to issue a memory operation. These steps touch nothing
// shared, so their order does not matter.
bool normalize(RelaxedConfig& c, std::vector<Step>& path, std::size_t max_steps) {
  for (std::size_t t = 0; t < c.threads.size(); ++t) {
    const ThreadId id{static_cast<int>(t)};
    std::size_t n = 0;
    for (;;) {
      Decomposition d = decompose(c.threads[t]);
      if (d.kind != Decomposition::Kind::kRedex || is_memory_redex(d.focus)) break;
      if (++n > max_steps) return false;
      auto next = local_step(c, id);
      if (!next) break;
      c = std::move(*next);
      path.push_back(LocalStep{id});
    }
  }
  return true;
}

}  // namespace

ClosureResult eager_local_closure(const RelaxedConfig& c, std::size_t max_states, std::size_t max_depth) {
  ClosureResult res;
  ClosureItem start{c, {}};
  if (!normalize(start.config, start.path, max_depth)) res.complete = false;
  auto issuers = [](const RelaxedConfig& x) {
    std::vector<ThreadId> out;
    for (std::size_t t = 0; t < x.threads.size(); ++t) {
      if (x.threads[t].is_value()) continue;
      Decomposition d = decompose(x.threads[t]);
      if (d.kind == Decomposition::Kind::kRedex && is_memory_redex(d.focus)) out.push_back(ThreadId{static_cast<int>(t)});
    }
    return out;
  };
  std::vector<ThreadId> first = issuers(start.config);
  if (first.empty()) {
    res.maximal.push_back(std::move(start));
    return res;
  }
  start.key = canonicalize(start.config);
  std::unordered_set<CanonicalKey, CanonicalKeyHash> seen{*start.key};
  std::deque<ClosureItem> queue;
  queue.push_back(std::move(start));
  for (std::size_t head = 0; head < queue.size(); ++head) {
    ClosureItem& item = queue[head];
    std::vector<ThreadId> ts = head == 0 ? first : issuers(item.config);
    if (ts.empty()) {
      res.maximal.push_back(std::move(item));
      continue;
    }
    for (ThreadId id : ts) {
      auto next = local_step(item.config, id);
      if (!next) continue;
      ClosureItem n{std::move(*next), item.path};
      n.path.push_back(LocalStep{id});
      if (!normalize(n.config, n.path, max_depth)) res.complete = false;
      if (n.path.size() > max_depth) {
        res.complete = false;
        continue;
      }
      n.key = canonicalize(n.config);
      if (!seen.insert(*n.key).second) continue;
      if (seen.size() > max_states) {
        res.complete = false;
        break;
      }
      queue.push_back(std::move(n));
    }
  }
  return res;
}

// ---- search engine

namespace {

struct Succ {
  std::vector<Step> edge;
  RelaxedConfig config;
  CanonicalKey key;
};

struct Root {
  RelaxedConfig config;
  std::vector<Step> path;
};

struct SearchResult {
  ExplorationResult result;
  std::optional<std::vector<Step>> found;  // path to a target state
};

constexpr std::size_t kMaxDiagnostics = 8;
constexpr std::uint32_t kNoParent = UINT32_MAX;
constexpr std::size_t kChunk = 4096;

class Search {
 public:
  Search(const MemoryModel& m, const ExploreOptions& opts, const StorePredicate* target, std::size_t budget)
      : m_(m), opts_(opts), target_(target), budget_(budget) {}

  SearchResult run(std::vector<Root> roots) {
    SearchResult out;
    ExplorationResult& r = out.result;
    std::vector<Frontier> frontier;
    for (Root& root : roots) {
      CanonicalKey k = canonicalize(root.config);
      if (!visited_.insert(k).second) continue;
      std::uint32_t id = record(kNoParent, std::move(root.path));
      if (visit(root.config, id, out)) return out;
      frontier.push_back({std::move(root.config), id});
    }
    r.stats.max_frontier = frontier.size();
    std::size_t depth = 0;
    while (!frontier.empty()) {
      if (depth >= opts_.max_depth) {
        truncate(r, "depth limit " + std::to_string(opts_.max_depth) + " reached");
        break;
      }
      std::vector<Frontier> next;
      bool stop = false;
      // Chunked so that only a slice of the successors is alive at once.
      for (std::size_t lo = 0; lo < frontier.size() && !stop; lo += kChunk) {
      const std::size_t hi = std::min(frontier.size(), lo + kChunk);
      std::vector<std::vector<Succ>> succs = expand_all(frontier, lo, hi);
      for (std::size_t i = lo; i < hi && !stop; ++i) {
        std::vector<Succ>& out_i = succs[i - lo];
        r.stats.transitions += out_i.size();
        if (out_i.empty() && !frontier[i].config.is_final()) {
          ++r.stats.stuck_states;
          note(r, "stuck configuration: " + to_string(frontier[i].config));
        }
        for (Succ& s : out_i) {
          if (!visited_.insert(s.key).second) continue;
          if (visited_.size() > budget_) {
            truncate(r, "state limit " + std::to_string(opts_.max_states) + " reached");
            stop = true;
            break;
          }
          std::uint32_t id = record(frontier[i].id, std::move(s.edge));
          if (visit(s.config, id, out)) return out;
          if (r.invariant_violated) {
            truncate(r, "invariant violation");
            stop = true;
            break;
          }
          next.push_back({std::move(s.config), id});
        }
        std::vector<Succ>().swap(out_i);
      }
      }
      if (stop) break;
      frontier = std::move(next);
      r.stats.max_frontier = std::max(r.stats.max_frontier, frontier.size());
      ++depth;
    }
    return out;
  }

  std::size_t visited() const { return visited_.size(); }

 private:
  struct Frontier {
    RelaxedConfig config;
    std::uint32_t id;
  };

  std::uint32_t record(std::uint32_t parent, std::vector<Step> edge) {
    if (!target_) return 0;
    parents_.push_back(parent);
    edges_.push_back(std::move(edge));
    return static_cast<std::uint32_t>(parents_.size() - 1);
  }

  std::vector<Step> path_to(std::uint32_t id) const {
    std::vector<std::uint32_t> chain;
    for (std::uint32_t i = id; i != kNoParent; i = parents_[i]) chain.push_back(i);
    std::vector<Step> path;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
      path.insert(path.end(), edges_[*it].begin(), edges_[*it].end());
    return path;
  }

  static void note(ExplorationResult& r, std::string msg) {
    if (r.diagnostics.size() < kMaxDiagnostics) r.diagnostics.push_back(std::move(msg));
  }

  static void truncate(ExplorationResult& r, std::string why) {
    if (r.exhaustive) r.truncation = std::move(why);
    r.exhaustive = false;
  }

  // Returns true when the search target was reached.
  bool visit(const RelaxedConfig& c, std::uint32_t id, SearchResult& out) {
    ExplorationResult& r = out.result;
    r.stats.states_visited = visited_.size();
    if (opts_.check_invariants) {
      if (auto v = check_invariants(c)) {
        r.invariant_violated = true;
        note(r, "invariant violated: " + *v + " in " + to_string(c));
      }
    }
    if (!c.is_final()) return false;
    r.outcomes.insert(c.store);
    if (target_ && (*target_)(c.store)) {
      out.found = path_to(id);
      return true;
    }
    return false;
  }

  std::vector<Succ> expand(const RelaxedConfig& c) const {
    std::vector<Succ> out;
    if (opts_.strategy == Strategy::kBruteDag) {
      for (auto& [step, next] : step_all(c, m_, opts_.visibility)) {
        CanonicalKey k = canonicalize(next);
        std::vector<Step> edge;
        if (target_) edge.push_back(step);
        out.push_back({std::move(edge), std::move(next), k});
      }
      return out;
    }
    for (const GlobalStep& g : enabled_global(c, m_, opts_.visibility)) {
      auto next = apply_step(c, g, m_);
      if (!next) continue;
      ClosureResult cl = eager_local_closure(*next, opts_.max_states, opts_.max_depth);
      if (!cl.complete) closure_incomplete_ = true;
      for (ClosureItem& item : cl.maximal) {
        std::vector<Step> edge;
        if (target_) {
          edge.push_back(g);
          edge.insert(edge.end(), item.path.begin(), item.path.end());
        }
        CanonicalKey k = item.key ? *item.key : canonicalize(item.config);
        out.push_back({std::move(edge), std::move(item.config), k});
      }
    }
    return out;
  }

  std::vector<std::vector<Succ>> expand_all(const std::vector<Frontier>& frontier, std::size_t lo,
                                            std::size_t hi) const {
    const std::size_t n = hi - lo;
    std::vector<std::vector<Succ>> succs(n);
    const std::size_t workers = std::min<std::size_t>(std::max(1U, opts_.workers), n);
    if (workers <= 1 || n < 4) {
      for (std::size_t i = 0; i < n; ++i) succs[i] = expand(frontier[lo + i].config);
      return succs;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto work = [&] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) succs[i] = expand(frontier[lo + i].config);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = n;
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return succs;
  }

 public:
  mutable std::atomic<bool> closure_incomplete_{false};

 private:
  const MemoryModel& m_;
  const ExploreOptions& opts_;
  const StorePredicate* target_;
  std::size_t budget_;
  std::unordered_set<CanonicalKey, CanonicalKeyHash> visited_;
  std::vector<std::uint32_t> parents_;
  std::vector<std::vector<Step>> edges_;
};

void absorb(ExplorationResult& into, const ExplorationResult& part) {
  into.outcomes.merge(part.outcomes);
  if (!part.exhaustive && into.exhaustive) {
    into.exhaustive = false;
    into.truncation = part.truncation;
  }
  into.stats.states_visited += part.stats.states_visited;
  into.stats.transitions += part.stats.transitions;
  into.stats.stuck_states += part.stats.stuck_states;
  into.stats.max_frontier = std::max(into.stats.max_frontier, part.stats.max_frontier);
  for (const auto& d : part.diagnostics)
    if (into.diagnostics.size() < kMaxDiagnostics) into.diagnostics.push_back(d);
  into.invariant_violated = into.invariant_violated || part.invariant_violated;
}

SearchResult run_strategy(const RelaxedConfig& initial, const MemoryModel& m, const ExploreOptions& opts,
                          const StorePredicate* target) {
  const auto t0 = std::chrono::steady_clock::now();
  SearchResult out;
  auto finish = [&] {
    out.result.stats.elapsed = std::chrono::steady_clock::now() - t0;
    return std::move(out);
  };
  if (opts.strategy == Strategy::kBruteDag) {
    Search s(m, opts, target, opts.max_states);
    out = s.run({Root{initial, {}}});
    return finish();
  }
  ClosureResult cl = eager_local_closure(initial, opts.max_states, opts.max_depth);
  auto mark_closure = [&](ExplorationResult& r, bool incomplete) {
    if (incomplete && r.exhaustive) {
      r.exhaustive = false;
      r.truncation = "local evaluation diverged or exceeded the limits";
    }
  };
  if (opts.strategy == Strategy::kEagerLocal) {
    std::vector<Root> roots;
    for (ClosureItem& item : cl.maximal) roots.push_back({std::move(item.config), std::move(item.path)});
    Search s(m, opts, target, opts.max_states);
    out = s.run(std::move(roots));
    mark_closure(out.result, !cl.complete || s.closure_incomplete_);
    return finish();
  }
  // Partitioned: one independent search per maximal temporary store.
  bool incomplete = !cl.complete;
  for (ClosureItem& item : cl.maximal) {
    std::size_t used = out.result.stats.states_visited;
    if (used >= opts.max_states) {
      out.result.exhaustive = false;
      out.result.truncation = "state limit " + std::to_string(opts.max_states) + " reached";
      break;
    }
    Search s(m, opts, target, opts.max_states - used);
    std::vector<Step> prefix = item.path;
    SearchResult part = s.run({Root{std::move(item.config), {}}});
    incomplete = incomplete || s.closure_incomplete_;
    absorb(out.result, part.result);
    if (part.found) {
      prefix.insert(prefix.end(), part.found->begin(), part.found->end());
      out.found = std::move(prefix);
      break;
    }
    if (part.result.invariant_violated) break;
  }
  mark_closure(out.result, incomplete);
  return finish();
}

}  // namespace

ExplorationResult explore(const RelaxedConfig& initial, const MemoryModel& m, const ExploreOptions& opts) {
  return run_strategy(initial, m, opts, nullptr).result;
}

RelaxedConfig replay_witness(const Witness& w, const MemoryModel& m) {
  RelaxedConfig c = w.initial;
  for (std::size_t i = 0; i < w.steps.size(); ++i) {
    auto next = apply_step(c, w.steps[i], m);
    if (!next) throw ReplayError(i, "step " + std::to_string(i) + " (" + describe_step(c, w.steps[i]) +
                                        ") is not enabled");
    c = std::move(*next);
  }
  return c;
}

WitnessSearch find_witness(const RelaxedConfig& initial, const MemoryModel& m, const StorePredicate& target,
                           const ExploreOptions& opts) {
  SearchResult r = run_strategy(initial, m, opts, &target);
  WitnessSearch out;
  if (r.found) {
    out.witness = Witness{initial, std::move(*r.found)};
    return out;
  }
  out.exhaustive = r.result.exhaustive;
  out.truncation = r.result.truncation;
  return out;
}

std::vector<std::string> describe_witness(const Witness& w, const MemoryModel& m) {
  std::vector<std::string> out;
  RelaxedConfig c = w.initial;
  for (const Step& s : w.steps) {
    out.push_back(describe_step(c, s));
    auto next = apply_step(c, s, m);
    if (!next) {
      out.push_back("(replay failed)");
      break;
    }
    c = std::move(*next);
  }
  return out;
}

}  // namespace rmm
