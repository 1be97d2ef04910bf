#include "rmm/config.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace rmm {

bool WriteOp::has_served(const IdentName& i) const {
  return std::binary_search(served.begin(), served.end(), i);
}

RelaxedConfig RelaxedConfig::initial(Store store, ThreadPool threads) {
  RelaxedConfig c;
  c.store = std::move(store);
  c.fresh.assign(threads.size(), 0);
  c.threads = std::move(threads);
  return c;
}

bool RelaxedConfig::is_normal() const {
  if (!temp.empty()) return false;
  for (const auto& e : threads)
    if (!e.is_pure()) return false;
  return store_is_pure(store);
}

bool RelaxedConfig::is_final() const {
  if (!is_normal()) return false;
  return std::all_of(threads.begin(), threads.end(), [](const Expr& e) { return e.is_value(); });
}

Entry subst_ident(const Entry& e, const IdentName& id, const Expr& v) {
  return std::visit(
      [&](const auto& op) -> Entry {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, ReadOp>) {
          return {e.thread, ReadOp{subst_ident(op.target, id, v), op.ident}};
        } else if constexpr (std::is_same_v<T, WriteOp>) {
          // The served set keeps the identifier.
          return {e.thread, WriteOp{subst_ident(op.target, id, v), subst_ident(op.value, id, v),
                                    op.visibility, op.served}};
        } else {
          return e;
        }
      },
      e.op);
}

TemporaryStore subst_ident(const TemporaryStore& s, const IdentName& id, const Expr& v) {
  TemporaryStore out;
  out.reserve(s.size());
  for (const auto& e : s) out.push_back(subst_ident(e, id, v));
  return out;
}

ThreadPool subst_ident(const ThreadPool& t, const IdentName& id, const Expr& v) {
  ThreadPool out;
  out.reserve(t.size());
  for (const auto& e : t) out.push_back(subst_ident(e, id, v));
  return out;
}

std::optional<std::string> check_invariants(const RelaxedConfig& c) {
  if (!store_is_pure(c.store)) return "store holds an identifier";
  std::set<IdentName> pending_reads;
  std::set<IdentName> issued;
  for (const auto& e : c.temp) {
    IdentName id;
    if (const auto* r = e.read()) {
      id = r->ident;
      pending_reads.insert(id);
    } else if (const auto* m = e.mark()) {
      id = m->ident;
    } else {
      continue;
    }
    if (!issued.insert(id).second) return "identifier " + to_string(id) + " issued twice";
  }
  std::map<IdentName, std::size_t> server;
  for (std::size_t i = 0; i < c.temp.size(); ++i) {
    const Entry& e = c.temp[i];
    if (const auto* w = e.write()) {
      if (!std::is_sorted(w->served.begin(), w->served.end())) return "unsorted served set";
      if (!w->visibility.subset_of(c.program_threads())) return "visibility outside program threads";
      for (const auto& id : w->served) {
        if (!server.emplace(id, i).second) return "identifier " + to_string(id) + " served twice";
        if (pending_reads.contains(id)) return "served identifier " + to_string(id) + " still pending";
      }
    } else if (const auto* m = e.mark()) {
      // A serving write is either earlier in the sequence or already retired.
      for (std::size_t j = i + 1; j < c.temp.size(); ++j) {
        const auto* w = c.temp[j].write();
        if (w && w->has_served(m->ident)) return "read mark precedes its write";
      }
    }
  }
  std::optional<std::string> dangling;
  auto check = [&](const Expr& x) {
    for_each_ident(x, [&](const IdentName& id) {
      if (!dangling && !pending_reads.contains(id))
        dangling = "identifier " + to_string(id) + " has no pending read";
    });
  };
  for (const auto& e : c.threads) check(e);
  for (const auto& e : c.temp) {
    if (const auto* r = e.read()) check(r->target);
    if (const auto* w = e.write()) {
      check(w->target);
      check(w->value);
    }
  }
  return dangling;
}

std::string to_string(const MemOp& op) {
  return std::visit(
      [](const auto& o) -> std::string {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, ReadOp>) {
          return "rd(" + to_string(o.target) + "," + to_string(o.ident) + ")";
        } else if constexpr (std::is_same_v<T, ReadMarkOp>) {
          return "mark(" + to_string(o.ident) + ")";
        } else if constexpr (std::is_same_v<T, WriteOp>) {
          std::string s = "wr(" + to_string(o.target) + "," + to_string(o.value) + ")";
          if (!o.visibility.empty() || !o.served.empty()) {
            s += "^" + to_string(o.visibility);
            s += ",{";
            for (std::size_t i = 0; i < o.served.size(); ++i) {
              if (i) s += ",";
              s += to_string(o.served[i]);
            }
            s += "}";
          }
          return s;
        } else {
          return o.kind;
        }
      },
      op);
}

std::string to_string(const Entry& e) { return "(" + to_string(e.thread) + "," + to_string(e.op) + ")"; }

std::string to_string(const TemporaryStore& s) {
  if (s.empty()) return "ε";
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "·";
    out += to_string(s[i]);
  }
  return out;
}

std::string to_string(const RelaxedConfig& c) {
  std::string out = "S=" + to_string(c.store) + "\nσ=" + to_string(c.temp) + "\n";
  for (std::size_t i = 0; i < c.threads.size(); ++i)
    out += to_string(ThreadId{static_cast<int>(i)}) + ": " + to_string(c.threads[i]) + "\n";
  return out;
}

}  // namespace rmm
