#include "rmm/model.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace rmm {

OpClass op_class(const MemOp& op) {
  switch (op.index()) {
    case 0:
      return OpClass::kRead;
    case 1:
      return OpClass::kReadMark;
    case 2:
      return OpClass::kWrite;
    default:
      return OpClass::kBarrier;
  }
}

BarrierSemantics barrier_semantics(std::string_view kind) {
  using C = OpClass;
  BarrierSemantics b;
  b.name = std::string(kind);
  if (kind == "wr") {
    b.after = {C::kWrite};
    b.before = {C::kRead};
  } else if (kind == "ww") {
    b.after = {C::kWrite};
    b.before = {C::kWrite};
  } else if (kind == "rr") {
    b.after = {C::kRead, C::kReadMark};
    b.before = {C::kRead};
  } else if (kind == "rw") {
    b.after = {C::kRead, C::kReadMark};
    b.before = {C::kWrite};
  } else if (kind == "sync") {
    b.after = {C::kWrite, C::kRead, C::kReadMark};
    b.before = {C::kRead, C::kWrite};
    b.waits_for_visible_writes = true;
  } else if (kind == "lwsync") {
    b.after = {C::kWrite, C::kRead, C::kReadMark};
    b.before = {C::kWrite};
    b.waits_for_visible_writes = true;
    b.fences_reads_behind_reads = true;
  } else {
    throw ModelError("unknown barrier kind '" + std::string(kind) + "'");
  }
  return b;
}

std::vector<std::string> standard_barrier_kinds() { return {"wr", "ww", "rr", "rw", "sync", "lwsync"}; }

const BarrierSemantics& MemoryModel::barrier(const std::string& kind) const {
  auto it = barriers.find(kind);
  if (it == barriers.end())
    throw ModelError("barrier '" + kind + "' is not supported by model " + name);
  return it->second;
}

namespace {

// alias(a, b): same location, or `a` is still an unresolved identifier.
bool alias(const Expr& a, const Expr& b) {
  if (a.kind() == Expr::Kind::kIdent) return true;
  return a == b;
}

}  // namespace

bool min_precedes(const Entry& earlier, const Entry& later, bool strict_wr_read) {
  const ThreadId t = earlier.thread;
  const ThreadId u = later.thread;
  if (const auto* w = earlier.write()) {
    const bool sees = u == t || w->visibility.contains(u);
    if (const auto* r = later.read())
      return alias(w->target, r->target) && (sees || (strict_wr_read && !w->served.empty()));
    if (const auto* w2 = later.write())
      return alias(w->target, w2->target) && (sees || (!w->served.empty() && !w2->served.empty()));
    if (const auto* m = later.mark()) return w->has_served(m->ident);
    return false;
  }
  if (const auto* r = earlier.read()) {
    if (const auto* w = later.write()) return t == u && alias(r->target, w->target);
  }
  return false;
}

bool precedes(const MemoryModel& m, const Entry& earlier, const Entry& later) {
  if (m.total_order) return true;
  if (m.minimal_precedence && min_precedes(earlier, later, m.strict_wr_read_precedence)) return true;

  const bool same_thread = earlier.thread == later.thread;
  const OpClass x = op_class(earlier.op);
  const OpClass y = op_class(later.op);

  if (same_thread) {
    using C = OpClass;
    if (!m.relax_wr && x == C::kWrite && y == C::kRead) return true;
    if (!m.relax_ww && x == C::kWrite && y == C::kWrite) return true;
    if (!m.relax_rr && x == C::kRead && y == C::kRead) return true;
    if (!m.relax_rw && x == C::kRead && y == C::kWrite) return true;
    if (m.coherence_rr && x == C::kRead && y == C::kRead &&
        alias(earlier.read()->target, later.read()->target))
      return true;
    if (const auto* b = earlier.barrier(); b && m.barrier(b->kind).before.contains(y)) return true;
  }
  if (const auto* b = later.barrier()) {
    const BarrierSemantics& sem = m.barrier(b->kind);
    if (same_thread && sem.after.contains(x)) return true;
    if (const auto* w = earlier.write(); w && sem.waits_for_visible_writes && w->visibility.contains(later.thread))
      return true;
  }
  return false;
}

bool commutable(const MemoryModel& m, std::span<const Entry> sigma, const Entry& cand) {
  if (sigma.empty()) return true;
  const bool cand_is_read = cand.read() != nullptr;
  bool read_seen = false;  // a read or read mark of cand's thread so far
  for (const Entry& x : sigma) {
    if (precedes(m, x, cand)) return false;
    if (!cand_is_read || x.thread != cand.thread) continue;
    if (x.read() || x.mark()) {
      read_seen = true;
    } else if (const auto* b = x.barrier(); b && read_seen && m.barrier(b->kind).fences_reads_behind_reads) {
      return false;
    }
  }
  return true;
}

bool commutable_barriers_only(const MemoryModel& m, std::span<const Entry> sigma, const Entry& cand) {
  std::vector<Entry> barriers;
  for (const Entry& x : sigma)
    if (x.barrier()) barriers.push_back(x);
  return commutable(m, barriers, cand);
}

bool grain_allows(const MemoryModel& m, ThreadSet w) {
  if (w.empty()) return true;
  switch (m.grain.kind) {
    case WriteGrain::Kind::kEmptyOnly:
      return false;
    case WriteGrain::Kind::kOwnOnly:
      return w.size() == 1;
    case WriteGrain::Kind::kAllSubsets:
      return true;
    case WriteGrain::Kind::kExplicit:
      return std::find(m.grain.sets.begin(), m.grain.sets.end(), w) != m.grain.sets.end();
  }
  return false;
}

std::string to_string(const WriteGrain& g) {
  switch (g.kind) {
    case WriteGrain::Kind::kEmptyOnly:
      return "none";
    case WriteGrain::Kind::kOwnOnly:
      return "own";
    case WriteGrain::Kind::kAllSubsets:
      return "all";
    case WriteGrain::Kind::kExplicit: {
      std::string s = "explicit[";
      for (std::size_t i = 0; i < g.sets.size(); ++i) {
        if (i) s += " ";
        s += to_string(g.sets[i]);
      }
      return s + "]";
    }
  }
  return "?";
}

std::vector<std::string> builtin_model_names() { return {"sc", "tso", "pso", "rmo", "relaxed", "power"}; }

MemoryModel builtin_model(std::string_view name) {
  MemoryModel m;
  m.name = std::string(name);
  auto add = [&m](std::initializer_list<const char*> kinds) {
    for (const char* k : kinds) m.barriers.emplace(k, barrier_semantics(k));
  };
  if (name == "sc") {
    m.total_order = true;
    m.grain = WriteGrain::own_only();
    add({"wr", "ww", "rr", "rw", "sync", "lwsync"});
  } else if (name == "tso") {
    m.relax_wr = true;
    m.grain = WriteGrain::own_only();
    add({"wr"});
  } else if (name == "pso") {
    m.relax_wr = m.relax_ww = true;
    m.grain = WriteGrain::own_only();
    add({"wr", "ww"});
  } else if (name == "rmo") {
    m.relax_wr = m.relax_ww = m.relax_rr = m.relax_rw = true;
    m.grain = WriteGrain::own_only();
    add({"wr", "ww", "rr", "rw"});
  } else if (name == "relaxed") {
    m.relax_wr = m.relax_ww = m.relax_rr = m.relax_rw = true;
    m.grain = WriteGrain::all_subsets();
    add({"wr", "ww", "rr", "rw", "sync", "lwsync"});
  } else if (name == "power") {
    m.relax_wr = m.relax_ww = m.relax_rr = m.relax_rw = true;
    m.grain = WriteGrain::all_subsets();
    add({"sync", "lwsync"});
  } else {
    throw ModelError("unknown memory model '" + std::string(name) + "'");
  }
  return m;
}

std::string describe(const MemoryModel& m) {
  std::ostringstream os;
  auto yn = [](bool b) { return b ? "relaxed" : "kept"; };
  os << "model " << m.name << "\n";
  if (m.total_order) {
    os << "  order: every pending operation stays in issue order\n";
  } else {
    os << "  W->R " << yn(m.relax_wr) << ", W->W " << yn(m.relax_ww) << ", R->R " << yn(m.relax_rr)
       << ", R->W " << yn(m.relax_rw) << "\n";
  }
  os << "  same-location read/read order: " << (m.coherence_rr ? "on" : "off") << "\n";
  os << "  served write precedes foreign reads: " << (m.strict_wr_read_precedence ? "yes" : "no")
     << "\n";
  os << "  write grain: " << to_string(m.grain) << "\n";
  os << "  barriers:";
  for (const auto& [k, b] : m.barriers) os << " " << k;
  os << "\n";
  return os.str();
}

namespace {

class SampleGen {
 public:
  SampleGen(const MemoryModel& m, std::uint64_t seed) : rng_(seed) {
    for (const auto& [k, b] : m.barriers) kinds_.push_back(k);
  }

  Entry entry() {
    ThreadId t{pick(3)};
    switch (pick(kinds_.empty() ? 3 : 4)) {
      case 0:
        return {t, ReadOp{location(), ident()}};
      case 1:
        return {t, ReadMarkOp{ident()}};
      case 2: {
        WriteOp w{location(), value(), ThreadSet(static_cast<std::uint64_t>(pick(8))), {}};
        for (int i = 0; i < 4; ++i)
          if (pick(4) == 0) w.served.push_back(IdentName{9, i});
        return {t, std::move(w)};
      }
      default:
        return {t, BarrierOp{kinds_[pick(static_cast<int>(kinds_.size()))]}};
    }
  }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

 private:
  Expr location() {
    switch (pick(3)) {
      case 0:
        return Expr::ref(RefName{"p"});
      case 1:
        return Expr::ref(RefName{"q"});
      default:
        return Expr::ident(ident());
    }
  }
  Expr value() {
    switch (pick(3)) {
      case 0:
        return Expr::tt();
      case 1:
        return Expr::ff();
      default:
        return Expr::ident(ident());
    }
  }
  IdentName ident() { return IdentName{9, pick(4)}; }

  std::mt19937_64 rng_;
  std::vector<std::string> kinds_;
};

}  // namespace

ValidationReport validate_model(const MemoryModel& m, std::size_t sample_budget, std::uint64_t seed) {
  ValidationReport report;
  SampleGen gen(m, seed);
  auto record = [&](std::string text) {
    if (report.counterexamples.size() < 8) report.counterexamples.push_back(std::move(text));
  };
  for (std::size_t n = 0; n < sample_budget; ++n) {
    ++report.samples;
    Entry cand = gen.entry();
    if (!commutable(m, {}, cand)) {
      ++report.empty_prefix_failures;
      record("ε does not admit " + to_string(cand));
    }
    TemporaryStore sigma;
    int len = 1 + gen.pick(6);
    for (int i = 0; i < len; ++i) sigma.push_back(gen.entry());
    if (!commutable(m, sigma, cand)) continue;
    for (const Entry& x : sigma) {
      if (min_precedes(x, cand, m.strict_wr_read_precedence)) {
        ++report.precedence_failures;
        record(to_string(sigma) + " admits " + to_string(cand) + " although " + to_string(x) +
               " precedes it");
        break;
      }
    }
  }
  return report;
}

}  // namespace rmm
