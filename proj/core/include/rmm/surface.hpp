#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rmm/term.hpp"

namespace rmm {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line(line) {}
  int line;
};

// ---- tokens

struct Token {
  enum class Kind {
    kId,
    kString,
    kLParen,
    kRParen,
    kLBrace,
    kRBrace,
    kSemi,
    kColon,
    kComma,
    kAssign,  // :=
    kBang,
    kBackslash,
    kArrow,  // ->
    kEq,
    kAnd,  // /\ .
    kOr,   // \/ .
    kEnd,
  };
  Kind kind = Kind::kEnd;
  std::string text;
  int line = 1;
};

/// Splits `text` into tokens; '#' starts a comment running to end of line.
std::vector<Token> tokenize(std::string_view text);

class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t ahead = 0) const;
  Token next();
  bool at(Token::Kind k) const { return peek().kind == k; }
  bool at_word(std::string_view w) const { return at(Token::Kind::kId) && peek().text == w; }
  bool accept(Token::Kind k);
  bool accept_word(std::string_view w);
  Token expect(Token::Kind k, std::string_view what);
  void expect_word(std::string_view w);
  /// An identifier that is not a reserved word.
  std::string expect_name(std::string_view what);
  int line() const { return peek().line; }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool is_reserved_word(std::string_view w);

// ---- surface syntax

struct SurfaceExpr;
using SurfacePtr = std::shared_ptr<const SurfaceExpr>;

struct SurfaceExpr {
  enum class Kind { kTrue, kFalse, kUnit, kName, kLambda, kApp, kIf, kLet, kSeq, kRefNew, kDeref, kAssign, kFence };
  Kind kind = Kind::kUnit;
  /// Name, lambda parameter, let variable, or barrier kind.
  std::string name;
  /// App: fun, arg. If: cond, then, else. Let: bound, body. Seq: first,
  /// rest. Lambda/RefNew/Deref: operand. Assign: target, value.
  std::vector<SurfacePtr> kids;
  int line = 0;
};

/// Structural equality, ignoring line numbers.
bool surface_equal(const SurfaceExpr& a, const SurfaceExpr& b);

/// seq := expr (';' expr)*
SurfacePtr parse_sequence(TokenCursor& in);
SurfacePtr parse_surface(std::string_view text);

/// Surface text with minimal parentheses; parses back to an equal tree.
std::string format_surface(const SurfaceExpr& e);

/// How free identifiers resolve: declared locations (with register flag).
using NameTable = std::map<std::string, RefName, std::less<>>;

/// Translation to the core language. Non-value operands are let-bound to
/// fresh variables "_1", "_2", ...; sequencing binds "_". Throws ParseError
/// for undeclared names.
Expr desugar(const SurfaceExpr& e, const NameTable& names);

}  // namespace rmm
