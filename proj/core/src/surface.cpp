#include "rmm/surface.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>

namespace rmm {

// ---- lexer

std::vector<Token> tokenize(std::string_view text) {
  using K = Token::Kind;
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  auto push = [&](K k, std::string t) { out.push_back({k, std::move(t), line}); };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    const char n = i + 1 < text.size() ? text[i + 1] : '\0';
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      push(K::kId, std::string(text.substr(i, j - i)));
      i = j;
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != '"' && text[j] != '\n') ++j;
      if (j >= text.size() || text[j] != '"') throw ParseError(line, "unterminated string");
      push(K::kString, std::string(text.substr(i + 1, j - i - 1)));
      i = j + 1;
      continue;
    }
    auto two = [&](K k, const char* t) {
      push(k, t);
      i += 2;
    };
    auto one = [&](K k) {
      push(k, std::string(1, c));
      ++i;
    };
    switch (c) {
      case ':':
        if (n == '=')
          two(K::kAssign, ":=");
        else
          one(K::kColon);
        continue;
      case '-':
        if (n == '>') {
          two(K::kArrow, "->");
          continue;
        }
        break;
      case '/':
        if (n == '\\') {
          two(K::kAnd, "/\\");
          continue;
        }
        break;
      case '\\':
        if (n == '/')
          two(K::kOr, "\\/");
        else
          one(K::kBackslash);
        continue;
      case '(':
        one(K::kLParen);
        continue;
      case ')':
        one(K::kRParen);
        continue;
      case '{':
        one(K::kLBrace);
        continue;
      case '}':
        one(K::kRBrace);
        continue;
      case ';':
        one(K::kSemi);
        continue;
      case ',':
        one(K::kComma);
        continue;
      case '!':
        one(K::kBang);
        continue;
      case '=':
        one(K::kEq);
        continue;
      default:
        break;
    }
    throw ParseError(line, std::string("unexpected character '") + c + "'");
  }
  out.push_back({K::kEnd, "", line});
  return out;
}

const Token& TokenCursor::peek(std::size_t ahead) const {
  return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
}

Token TokenCursor::next() {
  Token t = peek();
  if (pos_ < toks_.size() - 1) ++pos_;
  return t;
}

bool TokenCursor::accept(Token::Kind k) {
  if (!at(k)) return false;
  next();
  return true;
}

bool TokenCursor::accept_word(std::string_view w) {
  if (!at_word(w)) return false;
  next();
  return true;
}

namespace {
std::string describe(const Token& t) {
  if (t.kind == Token::Kind::kEnd) return "end of input";
  if (t.kind == Token::Kind::kString) return "\"" + t.text + "\"";
  return "'" + t.text + "'";
}
}  // namespace

Token TokenCursor::expect(Token::Kind k, std::string_view what) {
  if (!at(k)) throw ParseError(line(), "expected " + std::string(what) + ", found " + describe(peek()));
  return next();
}

void TokenCursor::expect_word(std::string_view w) {
  if (!at_word(w)) throw ParseError(line(), "expected '" + std::string(w) + "', found " + describe(peek()));
  next();
}

std::string TokenCursor::expect_name(std::string_view what) {
  Token t = expect(Token::Kind::kId, what);
  if (is_reserved_word(t.text)) throw ParseError(t.line, "'" + t.text + "' is a reserved word");
  return t.text;
}

bool is_reserved_word(std::string_view w) {
  static constexpr std::array<std::string_view, 11> kWords = {"let",   "in",   "if",     "then", "else", "ref",
                                                              "fence", "sync", "lwsync", "true", "false"};
  return std::find(kWords.begin(), kWords.end(), w) != kWords.end();
}

// ---- parser

namespace {

using SK = SurfaceExpr::Kind;

SurfacePtr node(SK k, int line, std::string name = {}, std::vector<SurfacePtr> kids = {}) {
  auto n = std::make_shared<SurfaceExpr>();
  n->kind = k;
  n->line = line;
  n->name = std::move(name);
  n->kids = std::move(kids);
  return n;
}

SurfacePtr parse_expr(TokenCursor& in);
SurfacePtr parse_unary(TokenCursor& in);

bool starts_unary(const TokenCursor& in) {
  using K = Token::Kind;
  const Token& t = in.peek();
  if (t.kind == K::kBang || t.kind == K::kLParen) return true;
  if (t.kind != K::kId) return false;
  if (t.text == "ref" || t.text == "true" || t.text == "false" || t.text == "fence" || t.text == "sync" ||
      t.text == "lwsync")
    return true;
  return !is_reserved_word(t.text);
}

SurfacePtr parse_atom(TokenCursor& in) {
  using K = Token::Kind;
  const int line = in.line();
  if (in.accept(K::kLParen)) {
    if (in.accept(K::kRParen)) return node(SK::kUnit, line);
    SurfacePtr e = parse_sequence(in);
    in.expect(K::kRParen, "')'");
    return e;
  }
  if (in.accept_word("true")) return node(SK::kTrue, line);
  if (in.accept_word("false")) return node(SK::kFalse, line);
  if (in.accept_word("sync")) return node(SK::kFence, line, "sync");
  if (in.accept_word("lwsync")) return node(SK::kFence, line, "lwsync");
  if (in.accept_word("fence")) {
    Token k = in.expect(K::kId, "barrier kind after 'fence'");
    return node(SK::kFence, line, k.text);
  }
  if (in.at(K::kId) && !is_reserved_word(in.peek().text)) return node(SK::kName, line, in.next().text);
  throw ParseError(line, "expected an expression, found '" + in.peek().text + "'");
}

SurfacePtr parse_unary(TokenCursor& in) {
  const int line = in.line();
  if (in.accept(Token::Kind::kBang)) return node(SK::kDeref, line, {}, {parse_unary(in)});
  if (in.accept_word("ref")) return node(SK::kRefNew, line, {}, {parse_unary(in)});
  return parse_atom(in);
}

SurfacePtr parse_app(TokenCursor& in) {
  SurfacePtr e = parse_unary(in);
  while (starts_unary(in)) {
    const int line = in.line();
    e = node(SK::kApp, line, {}, {e, parse_unary(in)});
  }
  return e;
}

SurfacePtr parse_expr(TokenCursor& in) {
  using K = Token::Kind;
  const int line = in.line();
  if (in.accept_word("let")) {
    std::string x = in.expect_name("variable after 'let'");
    in.expect(K::kEq, "'='");
    SurfacePtr bound = parse_sequence(in);
    in.expect_word("in");
    return node(SK::kLet, line, x, {bound, parse_sequence(in)});
  }
  if (in.accept(K::kBackslash)) {
    std::string x = in.expect_name("lambda parameter");
    in.expect(K::kArrow, "'->'");
    return node(SK::kLambda, line, x, {parse_sequence(in)});
  }
  if (in.accept_word("if")) {
    SurfacePtr c = parse_sequence(in);
    in.expect_word("then");
    SurfacePtr t = parse_sequence(in);
    in.expect_word("else");
    return node(SK::kIf, line, {}, {c, t, parse_expr(in)});
  }
  SurfacePtr lhs = parse_app(in);
  if (in.accept(K::kAssign)) return node(SK::kAssign, line, {}, {lhs, parse_expr(in)});
  return lhs;
}

}  // namespace

SurfacePtr parse_sequence(TokenCursor& in) {
  const int line = in.line();
  SurfacePtr first = parse_expr(in);
  if (!in.accept(Token::Kind::kSemi)) return first;
  return node(SK::kSeq, line, {}, {first, parse_sequence(in)});
}

SurfacePtr parse_surface(std::string_view text) {
  TokenCursor in(tokenize(text));
  SurfacePtr e = parse_sequence(in);
  if (!in.at(Token::Kind::kEnd)) throw ParseError(in.line(), "unexpected '" + in.peek().text + "'");
  return e;
}

bool surface_equal(const SurfaceExpr& a, const SurfaceExpr& b) {
  if (a.kind != b.kind || a.name != b.name || a.kids.size() != b.kids.size()) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!surface_equal(*a.kids[i], *b.kids[i])) return false;
  return true;
}

// ---- formatter

namespace {

int level_of(SK k) {
  switch (k) {
    case SK::kSeq:
      return 0;
    case SK::kLet:
    case SK::kLambda:
    case SK::kIf:
    case SK::kAssign:
      return 1;
    case SK::kApp:
      return 2;
    case SK::kDeref:
    case SK::kRefNew:
      return 3;
    default:
      return 4;
  }
}

// `tail`: nothing follows in the enclosing text, so a let, lambda or if may
// extend to the right without parentheses.
void fmt(const SurfaceExpr& e, int level, bool tail, std::string& out) {
  const bool open = e.kind == SK::kLet || e.kind == SK::kLambda || e.kind == SK::kIf;
  if (level_of(e.kind) < level || (open && !tail)) {
    out += '(';
    fmt(e, 0, true, out);
    out += ')';
    return;
  }
  switch (e.kind) {
    case SK::kTrue:
      out += "true";
      return;
    case SK::kFalse:
      out += "false";
      return;
    case SK::kUnit:
      out += "()";
      return;
    case SK::kName:
      out += e.name;
      return;
    case SK::kFence:
      out += (e.name == "sync" || e.name == "lwsync") ? e.name : "fence " + e.name;
      return;
    case SK::kSeq:
      fmt(*e.kids[0], 1, false, out);
      out += "; ";
      fmt(*e.kids[1], 0, tail, out);
      return;
    case SK::kLet:
      out += "let " + e.name + " = ";
      fmt(*e.kids[0], 0, true, out);
      out += " in ";
      fmt(*e.kids[1], 0, tail, out);
      return;
    case SK::kLambda:
      out += "\\" + e.name + " -> ";
      fmt(*e.kids[0], 0, tail, out);
      return;
    case SK::kIf:
      out += "if ";
      fmt(*e.kids[0], 0, true, out);
      out += " then ";
      fmt(*e.kids[1], 0, true, out);
      out += " else ";
      fmt(*e.kids[2], 1, tail, out);
      return;
    case SK::kAssign:
      fmt(*e.kids[0], 2, false, out);
      out += " := ";
      fmt(*e.kids[1], 1, tail, out);
      return;
    case SK::kApp:
      fmt(*e.kids[0], 2, false, out);
      out += ' ';
      fmt(*e.kids[1], 3, false, out);
      return;
    case SK::kDeref:
      out += '!';
      fmt(*e.kids[0], 3, false, out);
      return;
    case SK::kRefNew:
      out += "ref ";
      fmt(*e.kids[0], 3, false, out);
      return;
  }
}

}  // namespace

std::string format_surface(const SurfaceExpr& e) {
  std::string out;
  fmt(e, 0, true, out);
  return out;
}

// ---- desugaring

namespace {

class Desugarer {
 public:
  explicit Desugarer(const NameTable& names) : names_(names) {}

  Expr run(const SurfaceExpr& e) {
    switch (e.kind) {
      case SK::kTrue:
        return Expr::tt();
      case SK::kFalse:
        return Expr::ff();
      case SK::kUnit:
        return Expr::unit();
      case SK::kName: {
        if (std::find(scope_.rbegin(), scope_.rend(), e.name) != scope_.rend()) return Expr::var(e.name);
        auto it = names_.find(e.name);
        if (it == names_.end()) throw ParseError(e.line, "undeclared name '" + e.name + "'");
        return Expr::ref(it->second);
      }
      case SK::kFence:
        return Expr::barrier(e.name);
      case SK::kLambda:
        return Expr::lambda(e.name, bound(e.name, *e.kids[0]));
      case SK::kLet: {
        Expr init = run(*e.kids[0]);
        return Expr::app(Expr::lambda(e.name, bound(e.name, *e.kids[1])), std::move(init));
      }
      case SK::kSeq: {
        Expr first = run(*e.kids[0]);
        return Expr::app(Expr::lambda("_", bound("_", *e.kids[1])), std::move(first));
      }
      case SK::kApp:
        return atomize(*e.kids[0], [&](Expr f) {
          return atomize(*e.kids[1], [&](Expr a) { return Expr::app(std::move(f), std::move(a)); });
        });
      case SK::kIf:
        return atomize(*e.kids[0], [&](Expr c) {
          Expr t = run(*e.kids[1]);
          Expr f = run(*e.kids[2]);
          return Expr::if_(std::move(c), std::move(t), std::move(f));
        });
      case SK::kRefNew:
        return atomize(*e.kids[0], [](Expr v) { return Expr::ref_new(std::move(v)); });
      case SK::kDeref:
        return atomize(*e.kids[0], [](Expr v) { return Expr::deref(std::move(v)); });
      case SK::kAssign:
        return atomize(*e.kids[0], [&](Expr target) {
          return atomize(*e.kids[1], [&](Expr v) { return Expr::assign(std::move(target), std::move(v)); });
        });
    }
    throw ParseError(e.line, "unsupported expression");
  }

 private:
  Expr bound(const std::string& x, const SurfaceExpr& body) {
    scope_.push_back(x);
    Expr out = run(body);
    scope_.pop_back();
    return out;
  }

  // Desugars `e`; if the result is not a value, binds it to a fresh
  // variable and continues with that variable.
  Expr atomize(const SurfaceExpr& e, const std::function<Expr(Expr)>& k) {
    Expr v = run(e);
    if (v.is_value()) return k(std::move(v));
    std::string x = "_" + std::to_string(++fresh_);
    scope_.push_back(x);
    Expr body = k(Expr::var(x));
    scope_.pop_back();
    return Expr::app(Expr::lambda(x, std::move(body)), std::move(v));
  }

  const NameTable& names_;
  std::vector<std::string> scope_;
  int fresh_ = 0;
};

}  // namespace

Expr desugar(const SurfaceExpr& e, const NameTable& names) { return Desugarer(names).run(e); }

}  // namespace rmm
