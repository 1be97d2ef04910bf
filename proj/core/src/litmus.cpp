#include "rmm/litmus.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <set>
#include <stdexcept>

namespace rmm {

// ---- predicates

bool Predicate::eval(const Store& s) const {
  switch (kind) {
    case Kind::kEq: {
      auto it = s.find(RefName{name});
      return it != s.end() && it->second == literal;
    }
    case Kind::kAnd:
      return std::all_of(kids.begin(), kids.end(), [&](const Predicate& p) { return p.eval(s); });
    case Kind::kOr:
      return std::any_of(kids.begin(), kids.end(), [&](const Predicate& p) { return p.eval(s); });
  }
  return false;
}

std::vector<std::string> Predicate::names() const {
  std::vector<std::string> out;
  std::function<void(const Predicate&)> walk = [&](const Predicate& p) {
    if (p.kind == Kind::kEq) out.push_back(p.name);
    for (const Predicate& k : p.kids) walk(k);
  };
  walk(*this);
  return out;
}

bool operator==(const Predicate& a, const Predicate& b) {
  return a.kind == b.kind && a.name == b.name && a.kids == b.kids &&
         (a.kind != Predicate::Kind::kEq || a.literal == b.literal);
}

namespace {

std::string literal_text(const Expr& v) {
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

Expr parse_literal(TokenCursor& in) {
  if (in.accept_word("true")) return Expr::tt();
  if (in.accept_word("false")) return Expr::ff();
  if (in.at(Token::Kind::kLParen) && in.peek(1).kind == Token::Kind::kRParen) {
    in.next();
    in.next();
    return Expr::unit();
  }
  throw ParseError(in.line(), "expected true, false or ()");
}

void format_pred(const Predicate& p, std::string& out, Predicate::Kind parent, bool top) {
  using K = Predicate::Kind;
  if (p.kind == K::kEq) {
    out += p.name + " = " + literal_text(p.literal);
    return;
  }
  const bool paren = !top && (p.kind == parent || p.kind == K::kOr);
  if (paren) out += '(';
  const char* sep = p.kind == K::kAnd ? " /\\ " : " \\/ ";
  for (std::size_t i = 0; i < p.kids.size(); ++i) {
    if (i) out += sep;
    format_pred(p.kids[i], out, p.kind, false);
  }
  if (paren) out += ')';
}

Predicate parse_or(TokenCursor& in);

Predicate parse_pred_atom(TokenCursor& in) {
  const int line = in.line();
  if (in.accept(Token::Kind::kLParen)) {
    Predicate p = parse_or(in);
    in.expect(Token::Kind::kRParen, "')'");
    return p;
  }
  Predicate p;
  p.line = line;
  p.name = in.expect_name("name in predicate");
  in.expect(Token::Kind::kEq, "'='");
  p.literal = parse_literal(in);
  return p;
}

Predicate parse_and(TokenCursor& in) {
  Predicate first = parse_pred_atom(in);
  if (!in.at(Token::Kind::kAnd)) return first;
  Predicate p;
  p.kind = Predicate::Kind::kAnd;
  p.line = first.line;
  p.kids.push_back(std::move(first));
  while (in.accept(Token::Kind::kAnd)) p.kids.push_back(parse_pred_atom(in));
  return p;
}

Predicate parse_or(TokenCursor& in) {
  Predicate first = parse_and(in);
  if (!in.at(Token::Kind::kOr)) return first;
  Predicate p;
  p.kind = Predicate::Kind::kOr;
  p.line = first.line;
  p.kids.push_back(std::move(first));
  while (in.accept(Token::Kind::kOr)) p.kids.push_back(parse_and(in));
  return p;
}

}  // namespace

std::string to_string(const Predicate& p) {
  std::string out;
  format_pred(p, out, p.kind, true);
  return out;
}

Predicate parse_predicate(TokenCursor& in) { return parse_or(in); }

Predicate parse_predicate(std::string_view text) {
  TokenCursor in(tokenize(text));
  Predicate p = parse_or(in);
  if (!in.at(Token::Kind::kEnd)) throw ParseError(in.line(), "unexpected '" + in.peek().text + "' in predicate");
  return p;
}

bool Assertion::applies_to(std::string_view model) const {
  return models.empty() || std::find(models.begin(), models.end(), model) != models.end();
}

std::string to_string(const Assertion& a) {
  std::string out;
  if (!a.models.empty()) {
    out += "under ";
    for (std::size_t i = 0; i < a.models.size(); ++i) out += (i ? "," : "") + a.models[i];
    out += ' ';
  }
  out += a.mode == AssertionMode::kExists ? "exists " : "forbidden ";
  out += to_string(a.pred);
  return out;
}

void apply_overrides(MemoryModel& m, const ModelOverrides& o) {
  if (o.grain) m.grain = WriteGrain{*o.grain, {}};
  if (o.coherence_rr) m.coherence_rr = *o.coherence_rr;
  if (o.strict_precedence) m.strict_wr_read_precedence = *o.strict_precedence;
}

// ---- tests

std::vector<std::string> LitmusTest::mentioned_models() const {
  std::vector<std::string> out{model};
  for (const Assertion& a : assertions)
    for (const std::string& m : a.models)
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  return out;
}

namespace {

void collect_barriers(const Expr& e, std::set<std::string>& out) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::kBarrier:
      out.insert(e.barrier_kind());
      return;
    case K::kLambda:
      collect_barriers(e.body(), out);
      return;
    case K::kApp:
      collect_barriers(e.fun(), out);
      collect_barriers(e.arg(), out);
      return;
    case K::kIf:
      collect_barriers(e.cond(), out);
      collect_barriers(e.then_branch(), out);
      collect_barriers(e.else_branch(), out);
      return;
    case K::kRefNew:
      collect_barriers(e.init(), out);
      return;
    case K::kAssign:
      collect_barriers(e.value(), out);
      return;
    default:
      return;
  }
}

}  // namespace

std::vector<std::string> LitmusTest::barrier_kinds() const {
  std::set<std::string> kinds;
  for (const LitmusThread& t : threads) collect_barriers(t.program, kinds);
  return {kinds.begin(), kinds.end()};
}

Store LitmusTest::initial_store() const {
  Store s;
  for (const auto& [name, v] : shared) s.emplace(RefName{name, false}, v);
  for (const std::string& r : regs) s.emplace(RefName{r, true}, Expr::ff());
  return s;
}

ThreadPool LitmusTest::thread_pool() const {
  ThreadPool pool;
  for (const LitmusThread& t : threads) pool.push_back(t.program);
  return pool;
}

bool same_test(const LitmusTest& a, const LitmusTest& b) {
  if (a.name != b.name || a.model != b.model || !(a.overrides == b.overrides) || a.regs != b.regs ||
      a.assertions != b.assertions || a.shared.size() != b.shared.size() || a.threads.size() != b.threads.size())
    return false;
  for (std::size_t i = 0; i < a.shared.size(); ++i)
    if (a.shared[i].first != b.shared[i].first || !(a.shared[i].second == b.shared[i].second)) return false;
  for (std::size_t i = 0; i < a.threads.size(); ++i)
    if (a.threads[i].name != b.threads[i].name || !surface_equal(*a.threads[i].body, *b.threads[i].body))
      return false;
  return true;
}

namespace {

constexpr std::array<std::string_view, 11> kHeaderWords = {
    "test", "model", "grain", "coherence", "precedence", "shared", "regs", "thread", "under", "exists", "forbidden"};

bool is_header_word(std::string_view w) {
  return std::find(kHeaderWords.begin(), kHeaderWords.end(), w) != kHeaderWords.end();
}

// Register uses by thread, gathered from the surface text.
struct RegisterUse {
  std::map<std::string, std::set<std::size_t>> writers;
  std::map<std::string, std::set<std::size_t>> readers;
  std::vector<std::pair<int, std::string>> escapes;  // (line, register)
};

void scan_registers(const SurfaceExpr& e, const std::set<std::string>& regs, std::vector<std::string>& scope,
                    std::size_t thread, RegisterUse& use) {
  using SK = SurfaceExpr::Kind;
  auto reg = [&](const SurfaceExpr& n) -> const std::string* {
    if (n.kind != SK::kName || !regs.contains(n.name)) return nullptr;
    if (std::find(scope.begin(), scope.end(), n.name) != scope.end()) return nullptr;
    return &n.name;
  };
  switch (e.kind) {
    case SK::kName:
      if (const std::string* r = reg(e)) use.escapes.emplace_back(e.line, *r);
      return;
    case SK::kAssign:
      if (const std::string* r = reg(*e.kids[0]))
        use.writers[*r].insert(thread);
      else
        scan_registers(*e.kids[0], regs, scope, thread, use);
      scan_registers(*e.kids[1], regs, scope, thread, use);
      return;
    case SK::kDeref:
      if (const std::string* r = reg(*e.kids[0]))
        use.readers[*r].insert(thread);
      else
        scan_registers(*e.kids[0], regs, scope, thread, use);
      return;
    case SK::kLambda:
      scope.push_back(e.name);
      scan_registers(*e.kids[0], regs, scope, thread, use);
      scope.pop_back();
      return;
    case SK::kLet:
      scan_registers(*e.kids[0], regs, scope, thread, use);
      scope.push_back(e.name);
      scan_registers(*e.kids[1], regs, scope, thread, use);
      scope.pop_back();
      return;
    default:
      for (const SurfacePtr& k : e.kids) scan_registers(*k, regs, scope, thread, use);
      return;
  }
}

std::vector<std::pair<int, std::string>> register_findings(const LitmusTest& t,
                                                           const std::vector<int>& thread_lines) {
  std::set<std::string> regs(t.regs.begin(), t.regs.end());
  RegisterUse use;
  for (std::size_t i = 0; i < t.threads.size(); ++i) {
    std::vector<std::string> scope;
    scan_registers(*t.threads[i].body, regs, scope, i, use);
  }
  std::vector<std::pair<int, std::string>> out;
  for (const auto& [line, r] : use.escapes)
    out.emplace_back(line, "register '" + r + "' may only be read with ! or assigned with :=");
  for (const auto& [r, ws] : use.writers) {
    const std::size_t w = *ws.begin();
    if (ws.size() > 1)
      out.emplace_back(thread_lines[*std::next(ws.begin())], "register '" + r + "' is written by threads " +
                                                                  t.threads[w].name + " and " +
                                                                  t.threads[*std::next(ws.begin())].name);
    auto rd = use.readers.find(r);
    if (rd == use.readers.end()) continue;
    for (std::size_t reader : rd->second)
      if (!ws.contains(reader))
        out.emplace_back(thread_lines[reader], "register '" + r + "' is written by " + t.threads[w].name +
                                                   " and read by " + t.threads[reader].name);
  }
  return out;
}

WriteGrain::Kind parse_grain(TokenCursor& in) {
  const int line = in.line();
  Token t = in.expect(Token::Kind::kId, "grain");
  if (t.text == "own") return WriteGrain::Kind::kOwnOnly;
  if (t.text == "all") return WriteGrain::Kind::kAllSubsets;
  if (t.text == "none") return WriteGrain::Kind::kEmptyOnly;
  throw ParseError(line, "grain must be own, all or none");
}

bool parse_switch(TokenCursor& in, std::string_view yes, std::string_view no) {
  const int line = in.line();
  Token t = in.expect(Token::Kind::kId, std::string(yes) + " or " + std::string(no));
  if (t.text == yes) return true;
  if (t.text == no) return false;
  throw ParseError(line, "expected " + std::string(yes) + " or " + std::string(no));
}

std::string grain_word(WriteGrain::Kind k) {
  switch (k) {
    case WriteGrain::Kind::kOwnOnly:
      return "own";
    case WriteGrain::Kind::kAllSubsets:
      return "all";
    case WriteGrain::Kind::kEmptyOnly:
      return "none";
    case WriteGrain::Kind::kExplicit:
      break;
  }
  return "explicit";
}

}  // namespace

LitmusTest parse_test(std::string_view text, const ParseOptions& opts) {
  using K = Token::Kind;
  TokenCursor in(tokenize(text));
  LitmusTest t;
  NameTable names;
  bool have_name = false;
  bool have_model = false;
  std::vector<int> thread_lines;
  auto declare = [&](const std::string& n, bool reg, int line) {
    if (is_header_word(n)) throw ParseError(line, "'" + n + "' is a reserved word");
    if (!names.emplace(n, RefName{n, reg}).second) throw ParseError(line, "'" + n + "' declared twice");
  };
  while (!in.at(K::kEnd)) {
    const int line = in.line();
    if (in.accept_word("test")) {
      if (have_name) throw ParseError(line, "duplicate test name");
      t.name = in.expect(K::kString, "quoted test name").text;
      have_name = true;
    } else if (in.accept_word("model")) {
      if (have_model) throw ParseError(line, "duplicate model");
      t.model = in.expect(K::kId, "model name").text;
      have_model = true;
    } else if (in.accept_word("grain")) {
      t.overrides.grain = parse_grain(in);
    } else if (in.accept_word("coherence")) {
      t.overrides.coherence_rr = parse_switch(in, "on", "off");
    } else if (in.accept_word("precedence")) {
      t.overrides.strict_precedence = parse_switch(in, "strict", "loose");
    } else if (in.accept_word("shared")) {
      while (in.at(K::kId) && in.peek(1).kind == K::kEq) {
        const int l = in.line();
        std::string n = in.expect_name("location name");
        in.next();
        declare(n, false, l);
        t.shared.emplace_back(n, parse_literal(in));
      }
    } else if (in.accept_word("regs")) {
      while (in.at(K::kId) && !is_header_word(in.peek().text)) {
        const int l = in.line();
        std::string n = in.expect_name("register name");
        declare(n, true, l);
        t.regs.push_back(n);
      }
    } else if (in.accept_word("thread")) {
      std::string n = in.expect(K::kId, "thread name").text;
      for (const LitmusThread& other : t.threads)
        if (other.name == n) throw ParseError(line, "duplicate thread '" + n + "'");
      in.expect(K::kColon, "':'");
      in.expect(K::kLBrace, "'{'");
      SurfacePtr body = parse_sequence(in);
      in.expect(K::kRBrace, "'}'");
      t.threads.push_back({n, std::move(body), {}});
      thread_lines.push_back(line);
    } else if (in.at_word("under") || in.at_word("exists") || in.at_word("forbidden")) {
      Assertion a;
      a.line = line;
      if (in.accept_word("under")) {
        do a.models.push_back(in.expect(K::kId, "model name").text);
        while (in.accept(K::kComma));
      }
      if (in.accept_word("exists"))
        a.mode = AssertionMode::kExists;
      else if (in.accept_word("forbidden"))
        a.mode = AssertionMode::kForbidden;
      else
        throw ParseError(in.line(), "expected exists or forbidden");
      a.pred = parse_predicate(in);
      t.assertions.push_back(std::move(a));
    } else {
      throw ParseError(line, "unexpected '" + in.peek().text + "'");
    }
  }
  if (!have_name) throw ParseError(1, "missing test name");
  if (!have_model) throw ParseError(1, "missing model");
  if (t.threads.empty()) throw ParseError(1, "no threads");
  if (t.threads.size() > static_cast<std::size_t>(ThreadSet::kMaxThreads))
    throw ParseError(1, "too many threads");

  for (LitmusThread& th : t.threads) th.program = desugar(*th.body, names);
  const std::vector<std::string> known = standard_barrier_kinds();
  for (std::size_t i = 0; i < t.threads.size(); ++i) {
    std::set<std::string> kinds;
    collect_barriers(t.threads[i].program, kinds);
    for (const std::string& k : kinds)
      if (std::find(known.begin(), known.end(), k) == known.end())
        throw ParseError(thread_lines[i], "unknown barrier kind '" + k + "'");
  }
  for (const Assertion& a : t.assertions)
    for (const std::string& n : a.pred.names())
      if (!names.contains(n)) throw ParseError(a.line, "undeclared name '" + n + "' in assertion");

  for (auto& [line, msg] : register_findings(t, thread_lines)) {
    if (opts.strict_registers) throw ParseError(line, msg);
    t.warnings.push_back("line " + std::to_string(line) + ": " + msg);
    t.registers_private = false;
  }
  return t;
}

std::string format_test(const LitmusTest& t) {
  std::string out = "test \"" + t.name + "\"\nmodel " + t.model + "\n";
  if (t.overrides.grain) out += "grain " + grain_word(*t.overrides.grain) + "\n";
  if (t.overrides.coherence_rr) out += std::string("coherence ") + (*t.overrides.coherence_rr ? "on" : "off") + "\n";
  if (t.overrides.strict_precedence)
    out += std::string("precedence ") + (*t.overrides.strict_precedence ? "strict" : "loose") + "\n";
  if (!t.shared.empty()) {
    out += "shared";
    for (const auto& [n, v] : t.shared) out += " " + n + "=" + literal_text(v);
    out += "\n";
  }
  if (!t.regs.empty()) {
    out += "regs";
    for (const std::string& r : t.regs) out += " " + r;
    out += "\n";
  }
  for (const LitmusThread& th : t.threads) out += "thread " + th.name + ": { " + format_surface(*th.body) + " }\n";
  for (const Assertion& a : t.assertions) out += to_string(a) + "\n";
  return out;
}

MemoryModel resolve_model(const LitmusTest& t, std::string_view name) {
  MemoryModel m = builtin_model(name.empty() ? std::string_view(t.model) : name);
  apply_overrides(m, t.overrides);
  return m;
}

std::vector<std::string> unsupported_barriers(const LitmusTest& t, const MemoryModel& m) {
  std::vector<std::string> out;
  for (const std::string& k : t.barrier_kinds())
    if (!m.knows_barrier(k)) out.push_back(k);
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kSat:
      return "SAT";
    case Verdict::kUnsat:
      return "UNSAT";
    case Verdict::kUnknown:
      return "UNKNOWN";
  }
  return "?";
}

bool TestRun::inconclusive() const {
  return std::any_of(results.begin(), results.end(),
                     [](const AssertionResult& r) { return r.verdict == Verdict::kUnknown; });
}

bool TestRun::all_hold() const {
  return std::all_of(results.begin(), results.end(), [](const AssertionResult& r) { return r.holds; });
}

ExploreOptions options_for(const LitmusTest& t, ExploreOptions opts) {
  if (!t.registers_private) opts.visibility.registers_own_only = false;
  return opts;
}

TestRun run_test(const LitmusTest& t, const MemoryModel& m, ExploreOptions opts, bool witnesses) {
  if (auto missing = unsupported_barriers(t, m); !missing.empty())
    throw ModelError("model " + m.name + " does not define barrier '" + missing.front() + "'");
  TestRun run;
  run.test = t.name;
  run.model = m;
  run.options = options_for(t, opts);
  const RelaxedConfig init = t.initial_config();
  run.exploration = explore(init, m, run.options);
  for (const Assertion& a : t.assertions) {
    if (!a.applies_to(m.name)) continue;
    AssertionResult r;
    r.assertion = a;
    bool sat = false;
    for (const Store& s : run.exploration.outcomes.stores()) sat = sat || a.pred.eval(s);
    r.verdict = sat ? Verdict::kSat : run.exploration.exhaustive ? Verdict::kUnsat : Verdict::kUnknown;
    r.holds = a.mode == AssertionMode::kExists ? r.verdict == Verdict::kSat : r.verdict == Verdict::kUnsat;
    if (witnesses && sat) {
      const Predicate& p = a.pred;
      r.witness = find_witness(init, m, [&p](const Store& s) { return p.eval(s); }, run.options).witness;
    }
    run.results.push_back(std::move(r));
  }
  return run;
}

std::vector<LitmusTest> builtin_corpus() {
  std::vector<LitmusTest> out;
  for (const CorpusEntry& e : corpus_sources()) out.push_back(parse_test(e.text));
  return out;
}

LitmusTest corpus_test(std::string_view name) {
  for (const CorpusEntry& e : corpus_sources()) {
    LitmusTest t = parse_test(e.text);
    if (t.name == name) return t;
  }
  throw std::out_of_range("no corpus test named '" + std::string(name) + "'");
}

}  // namespace rmm
