#include "rmm/rules.hpp"

#include <algorithm>

namespace rmm {

std::string to_string(Rule r) {
  switch (r) {
    case Rule::kLocal:
      return "local";
    case Rule::kR1:
      return "R1";
    case Rule::kR2:
      return "R2";
    case Rule::kR3:
      return "R3";
    case Rule::kR4:
      return "R4";
    case Rule::kR5:
      return "R5";
    case Rule::kR6:
      return "R6";
  }
  return "?";
}

namespace {

std::span<const Entry> prefix(const TemporaryStore& s, std::size_t n) { return {s.data(), n}; }

bool is_location(const Expr& e) { return e.kind() == Expr::Kind::kRef; }

RelaxedConfig resolve(RelaxedConfig c, const IdentName& id, const Expr& v) {
  for (Entry& e : c.temp) {
    if (auto* r = std::get_if<ReadOp>(&e.op)) {
      r->target = subst_ident(r->target, id, v);
    } else if (auto* w = std::get_if<WriteOp>(&e.op)) {
      w->target = subst_ident(w->target, id, v);
      w->value = subst_ident(w->value, id, v);
    }
  }
  for (Expr& t : c.threads) t = subst_ident(t, id, v);
  return c;
}

}  // namespace

std::optional<RelaxedConfig> local_step(const RelaxedConfig& c, ThreadId t) {
  using K = Expr::Kind;
  const auto i = static_cast<std::size_t>(t.value);
  if (i >= c.threads.size()) return std::nullopt;
  Decomposition d = decompose(c.threads[i]);
  if (d.kind != Decomposition::Kind::kRedex) return std::nullopt;
  const Expr& r = d.focus;
  RelaxedConfig next = c;
  Expr replacement;
  switch (r.kind()) {
    case K::kApp:
      replacement = subst_var(r.fun().body(), r.fun().param(), r.arg());
      break;
    case K::kIf:
      replacement = r.cond().kind() == K::kTrue ? r.then_branch() : r.else_branch();
      break;
    case K::kRefNew: {
      RefName p{"@" + std::to_string(t.value) + "." + std::to_string(next.fresh[i]++)};
      next.temp.push_back({t, WriteOp{Expr::ref(p), r.init(), {}, {}}});
      replacement = Expr::ref(std::move(p));
      break;
    }
    case K::kDeref: {
      IdentName id{t.value, next.fresh[i]++};
      next.temp.push_back({t, ReadOp{r.target(), id}});
      replacement = Expr::ident(id);
      break;
    }
    case K::kAssign:
      next.temp.push_back({t, WriteOp{r.target(), r.value(), {}, {}}});
      replacement = Expr::unit();
      break;
    case K::kBarrier:
      next.temp.push_back({t, BarrierOp{r.barrier_kind()}});
      replacement = Expr::unit();
      break;
    default:
      return std::nullopt;
  }
  next.threads[i] = plug(d.context, std::move(replacement));
  return next;
}

namespace {

bool r1_ok(const RelaxedConfig& c, std::size_t pos, const MemoryModel& m) {
  if (pos >= c.temp.size()) return false;
  const Entry& e = c.temp[pos];
  const ReadOp* r = e.read();
  if (!r || !is_location(r->target) || !c.store.contains(r->target.ref_name())) return false;
  return commutable(m, prefix(c.temp, pos), e);
}

bool r2_ok(const RelaxedConfig& c, std::size_t write_pos, std::size_t read_pos, const MemoryModel& m) {
  if (write_pos >= read_pos || read_pos >= c.temp.size()) return false;
  const Entry& we = c.temp[write_pos];
  const Entry& re = c.temp[read_pos];
  const WriteOp* w = we.write();
  const ReadOp* r = re.read();
  if (!w || !r || !is_location(r->target) || !(w->target == r->target)) return false;
  if (!w->visibility.contains(re.thread)) return false;
  std::span<const Entry> between(c.temp.data() + write_pos + 1, read_pos - write_pos - 1);
  return commutable(m, between, re) && commutable_barriers_only(m, prefix(c.temp, write_pos), re);
}

bool r3_ok(const RelaxedConfig& c, std::size_t pos, const MemoryModel& m) {
  if (pos >= c.temp.size()) return false;
  const Entry& e = c.temp[pos];
  const ReadMarkOp* mk = e.mark();
  if (!mk) return false;
  if (commutable(m, prefix(c.temp, pos), e)) return true;
  const ThreadSet everyone = c.program_threads();
  for (std::size_t i = 0; i < pos; ++i) {
    const WriteOp* w = c.temp[i].write();
    if (w && w->visibility == everyone && w->has_served(mk->ident) && commutable(m, prefix(c.temp, i), c.temp[i]))
      return true;
  }
  return false;
}

bool r4_ok(const RelaxedConfig& c, std::size_t pos, const MemoryModel& m) {
  if (pos >= c.temp.size()) return false;
  const Entry& e = c.temp[pos];
  const WriteOp* w = e.write();
  if (!w || !is_location(w->target) || !w->value.is_pure()) return false;
  return commutable(m, prefix(c.temp, pos), e);
}

bool r5_ok(const RelaxedConfig& c, std::size_t pos, ThreadSet new_w, const MemoryModel& m) {
  if (pos >= c.temp.size()) return false;
  const Entry& e = c.temp[pos];
  const WriteOp* w = e.write();
  if (!w || !new_w.contains(e.thread) || !w->visibility.strict_subset_of(new_w)) return false;
  return new_w.subset_of(c.program_threads()) && grain_allows(m, new_w);
}

bool r6_ok(const RelaxedConfig& c, std::size_t pos, const MemoryModel& m) {
  if (pos >= c.temp.size()) return false;
  const Entry& e = c.temp[pos];
  return e.barrier() && commutable(m, prefix(c.temp, pos), e);
}

RelaxedConfig without(const RelaxedConfig& c, std::size_t pos) {
  RelaxedConfig next;
  next.store = c.store;
  next.threads = c.threads;
  next.fresh = c.fresh;
  next.temp.reserve(c.temp.size() - 1);
  for (std::size_t i = 0; i < c.temp.size(); ++i)
    if (i != pos) next.temp.push_back(c.temp[i]);
  return next;
}

}  // namespace

std::optional<RelaxedConfig> r1_perform_read(const RelaxedConfig& c, std::size_t pos, const MemoryModel& m) {
  if (!r1_ok(c, pos, m)) return std::nullopt;
  const ReadOp* r = c.temp[pos].read();
  const IdentName id = r->ident;
  const Expr v = c.store.at(r->target.ref_name());
  return resolve(without(c, pos), id, v);
}

std::optional<RelaxedConfig> r2_read_early(const RelaxedConfig& c, std::size_t write_pos, std::size_t read_pos,
                                           const MemoryModel& m) {
  if (!r2_ok(c, write_pos, read_pos, m)) return std::nullopt;
  const IdentName id = c.temp[read_pos].read()->ident;
  const Expr v = c.temp[write_pos].write()->value;
  RelaxedConfig next = c;
  auto& served = std::get<WriteOp>(next.temp[write_pos].op).served;
  served.insert(std::upper_bound(served.begin(), served.end(), id), id);
  next.temp[read_pos].op = ReadMarkOp{id};
  return resolve(std::move(next), id, v);
}

std::optional<RelaxedConfig> r3_eliminate_mark(const RelaxedConfig& c, std::size_t pos, const MemoryModel& m) {
  if (!r3_ok(c, pos, m)) return std::nullopt;
  return without(c, pos);
}

std::optional<RelaxedConfig> r4_perform_write(const RelaxedConfig& c, std::size_t pos, const MemoryModel& m) {
  if (!r4_ok(c, pos, m)) return std::nullopt;
  const WriteOp* w = c.temp[pos].write();
  RelaxedConfig next = without(c, pos);
  next.store.insert_or_assign(w->target.ref_name(), w->value);
  return next;
}

std::optional<RelaxedConfig> r5_extend_visibility(const RelaxedConfig& c, std::size_t pos, ThreadSet new_w,
                                                  const MemoryModel& m) {
  if (!r5_ok(c, pos, new_w, m)) return std::nullopt;
  RelaxedConfig next = c;
  std::get<WriteOp>(next.temp[pos].op).visibility = new_w;
  return next;
}

std::optional<RelaxedConfig> r6_perform_barrier(const RelaxedConfig& c, std::size_t pos, const MemoryModel& m) {
  if (!r6_ok(c, pos, m)) return std::nullopt;
  return without(c, pos);
}

ThreadSet live_threads(const ThreadPool& threads) {
  ThreadSet s;
  for (std::size_t i = 0; i < threads.size(); ++i)
    if (!threads[i].is_value()) s = s.with(ThreadId{static_cast<int>(i)});
  return s;
}

ThreadSet reading_threads(std::span<const Entry> sigma) {
  ThreadSet s;
  for (const Entry& e : sigma)
    if (e.read()) s = s.with(e.thread);
  return s;
}

std::vector<ThreadSet> visibility_candidates(const RelaxedConfig& c, std::size_t pos, const MemoryModel& m,
                                             const VisibilityOptions& opts) {
  std::vector<ThreadSet> out;
  if (pos >= c.temp.size()) return out;
  const Entry& e = c.temp[pos];
  const WriteOp* w = e.write();
  if (!w) return out;
  const ThreadSet everyone = c.program_threads();
  ThreadSet observers;
  if (opts.restrict_to_observers) {
    std::span<const Entry> after(c.temp.data() + pos + 1, c.temp.size() - pos - 1);
    observers = live_threads(c.threads) | reading_threads(after);
  }
  const bool register_write = opts.registers_own_only && w->target.kind() == Expr::Kind::kRef &&
                              w->target.ref_name().is_register;
  if (register_write) {
    ThreadSet own = ThreadSet::single(e.thread);
    bool observed = !opts.restrict_to_observers || own == everyone || own.subset_of(observers);
    if (w->visibility.strict_subset_of(own) && grain_allows(m, own) && observed) out.push_back(own);
    return out;
  }
  // Enumerate supersets of W ∪ {t} inside the program's threads.
  const std::uint64_t base = w->visibility.with(e.thread).bits();
  const std::uint64_t free_bits = everyone.bits() & ~base;
  std::uint64_t sub = 0;
  do {
    ThreadSet cand(base | sub);
    if (w->visibility.strict_subset_of(cand) && grain_allows(m, cand) &&
        (!opts.restrict_to_observers || cand == everyone || cand.subset_of(observers)))
      out.push_back(cand);
    sub = (sub - free_bits) & free_bits;
  } while (sub != 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<GlobalStep> enabled_global(const RelaxedConfig& c, const MemoryModel& m,
                                       const VisibilityOptions& opts) {
  std::vector<GlobalStep> out;
  const std::size_t n = c.temp.size();
  for (std::size_t i = 0; i < n; ++i)
    if (r1_ok(c, i, m)) out.push_back({Rule::kR1, i, 0, {}});
  for (std::size_t i = 0; i < n; ++i) {
    const WriteOp* w = c.temp[i].write();
    if (!w || !is_location(w->target) || w->visibility.empty()) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      const ReadOp* r = c.temp[j].read();
      if (r && r->target == w->target && r2_ok(c, i, j, m)) out.push_back({Rule::kR2, i, j, {}});
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (r3_ok(c, i, m)) out.push_back({Rule::kR3, i, 0, {}});
  for (std::size_t i = 0; i < n; ++i)
    if (r4_ok(c, i, m)) out.push_back({Rule::kR4, i, 0, {}});
  for (std::size_t i = 0; i < n; ++i) {
    if (!c.temp[i].write()) continue;
    for (ThreadSet w : visibility_candidates(c, i, m, opts)) out.push_back({Rule::kR5, i, 0, w});
  }
  for (std::size_t i = 0; i < n; ++i)
    if (r6_ok(c, i, m)) out.push_back({Rule::kR6, i, 0, {}});
  return out;
}

std::optional<RelaxedConfig> apply_step(const RelaxedConfig& c, const Step& s, const MemoryModel& m) {
  if (const auto* l = std::get_if<LocalStep>(&s)) return local_step(c, l->thread);
  const auto& g = std::get<GlobalStep>(s);
  switch (g.rule) {
    case Rule::kR1:
      return r1_perform_read(c, g.pos, m);
    case Rule::kR2:
      return r2_read_early(c, g.pos, g.read_pos, m);
    case Rule::kR3:
      return r3_eliminate_mark(c, g.pos, m);
    case Rule::kR4:
      return r4_perform_write(c, g.pos, m);
    case Rule::kR5:
      return r5_extend_visibility(c, g.pos, g.new_visibility, m);
    case Rule::kR6:
      return r6_perform_barrier(c, g.pos, m);
    case Rule::kLocal:
      break;
  }
  return std::nullopt;
}

std::string describe_step(const RelaxedConfig& before, const Step& s) {
  if (const auto* l = std::get_if<LocalStep>(&s)) {
    std::string out = "local " + to_string(l->thread);
    const auto i = static_cast<std::size_t>(l->thread.value);
    if (i < before.threads.size()) {
      Decomposition d = decompose(before.threads[i]);
      if (d.kind == Decomposition::Kind::kRedex) out += ": " + to_string(d.focus);
    }
    return out;
  }
  const auto& g = std::get<GlobalStep>(s);
  auto entry = [&](std::size_t p) {
    return p < before.temp.size() ? to_string(before.temp[p]) : std::string("<out of range>");
  };
  std::string out = to_string(g.rule) + " @" + std::to_string(g.pos) + " ";
  switch (g.rule) {
    case Rule::kR2:
      out = to_string(g.rule) + " @" + std::to_string(g.read_pos) + " " + entry(g.read_pos) + " from @" +
            std::to_string(g.pos) + " " + entry(g.pos);
      break;
    case Rule::kR5:
      out += entry(g.pos) + " visible to " + to_string(g.new_visibility);
      break;
    default:
      out += entry(g.pos);
      break;
  }
  return out;
}

}  // namespace rmm
