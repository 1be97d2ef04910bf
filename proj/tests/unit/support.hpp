#pragma once

#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "rmm/config.hpp"
#include "rmm/explorer.hpp"
#include "rmm/litmus.hpp"
#include "rmm/model.hpp"
#include "rmm/rules.hpp"
#include "rmm/surface.hpp"
#include "rmm/term.hpp"

namespace doctest {
template <>
struct StringMaker<rmm::Expr> {
  static String convert(const rmm::Expr& e) { return rmm::to_string(e).c_str(); }
};
template <>
struct StringMaker<rmm::Entry> {
  static String convert(const rmm::Entry& e) { return rmm::to_string(e).c_str(); }
};
template <>
struct StringMaker<rmm::ThreadSet> {
  static String convert(const rmm::ThreadSet& s) { return rmm::to_string(s).c_str(); }
};
}  // namespace doctest

namespace rmm::test {

inline Expr loc(const std::string& n) { return Expr::ref(RefName{n, false}); }
inline Expr reg(const std::string& n) { return Expr::ref(RefName{n, true}); }
inline IdentName id(int t, int i) { return IdentName{t, i}; }
inline Expr idv(int t, int i) { return Expr::ident(IdentName{t, i}); }
inline ThreadId tid(int t) { return ThreadId{t}; }
inline ThreadSet threads(std::initializer_list<int> ts) {
  ThreadSet s;
  for (int t : ts) s = s.with(ThreadId{t});
  return s;
}

inline Entry wr(int t, Expr target, Expr v, ThreadSet w = {}, std::vector<IdentName> served = {}) {
  return Entry{ThreadId{t}, WriteOp{std::move(target), std::move(v), w, std::move(served)}};
}
inline Entry rd(int t, Expr target, IdentName i) { return Entry{ThreadId{t}, ReadOp{std::move(target), i}}; }
inline Entry mark(int t, IdentName i) { return Entry{ThreadId{t}, ReadMarkOp{i}}; }
inline Entry bar(int t, std::string k) { return Entry{ThreadId{t}, BarrierOp{std::move(k)}}; }

/// Desugar `src` with the given locations declared (names starting with 'r'
/// are registers).
inline Expr program(std::string_view src, std::initializer_list<std::string> declared = {"p", "q", "r0", "r1"}) {
  NameTable names;
  for (const std::string& n : declared) names.emplace(n, RefName{n, n.front() == 'r'});
  return desugar(*parse_surface(src), names);
}

/// Configuration with the given temporary store; threads default to unit and
/// fresh counters start past every identifier in use.
inline RelaxedConfig with_temp(Store s, TemporaryStore temp, ThreadPool threads) {
  RelaxedConfig c = RelaxedConfig::initial(std::move(s), std::move(threads));
  c.temp = std::move(temp);
  for (int& f : c.fresh) f = 100;
  return c;
}

inline Store bool_store(std::initializer_list<std::pair<const char*, bool>> items) {
  Store s;
  for (auto& [n, v] : items) s.insert_or_assign(RefName{n, n[0] == 'r'}, Expr::boolean(v));
  return s;
}

inline bool is_true(const Store& s, const std::string& n) { return s.at(RefName{n}).kind() == Expr::Kind::kTrue; }

/// Random ANF term over variables x,y,z, locations p,q and identifiers of
/// threads 0..1. `depth` bounds nesting.
class TermGen {
 public:
  explicit TermGen(std::uint64_t seed) : rng_(seed) {}

  Expr value(int depth) {
    switch (pick(depth > 0 ? 8 : 7)) {
      case 0:
        return Expr::var(var_name());
      case 1:
        return Expr::tt();
      case 2:
        return Expr::ff();
      case 3:
        return Expr::unit();
      case 4:
        return loc(pick(2) ? "p" : "q");
      case 5:
      case 6:
        return idv(pick(2), pick(3));
      default:
        return Expr::lambda(var_name(), expr(depth - 1));
    }
  }

  Expr expr(int depth) {
    if (depth <= 0) return value(0);
    switch (pick(8)) {
      case 0:
        return Expr::app(value(depth - 1), expr(depth - 1));
      case 1:
        return Expr::if_(value(depth - 1), expr(depth - 1), expr(depth - 1));
      case 2:
        return Expr::ref_new(value(depth - 1));
      case 3:
        return Expr::deref(value(0));
      case 4:
        return Expr::assign(value(0), value(depth - 1));
      case 5:
        return Expr::barrier("wr");
      default:
        return value(depth);
    }
  }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::string var_name() { return std::string(1, "xyz"[pick(3)]); }
  std::mt19937_64 rng_;
};

}  // namespace rmm::test
