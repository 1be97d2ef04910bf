#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rmm/names.hpp"

namespace rmm {

/// Core-language term in administrative normal form. Immutable and cheap to
/// copy (shared node). Values are the terms whose kind is one of Var ..
/// Ident; the constructors below reject terms that break the ANF shape
/// (non-value in function, condition, or operand position).
class Expr {
 public:
  enum class Kind {
    kVar,
    kLambda,
    kTrue,
    kFalse,
    kUnit,
    kRef,
    kIdent,
    kApp,
    kIf,
    kRefNew,
    kDeref,
    kAssign,
    kBarrier,
  };

  /// Empty handle; only meaningful as a placeholder to be assigned over.
  Expr() = default;

  static Expr var(std::string name);
  static Expr lambda(std::string param, Expr body);
  static Expr tt();
  static Expr ff();
  static Expr unit();
  static Expr boolean(bool b) { return b ? tt() : ff(); }
  static Expr ref(RefName r);
  static Expr ident(IdentName i);
  static Expr app(Expr fun, Expr arg);
  static Expr if_(Expr cond, Expr then_branch, Expr else_branch);
  static Expr ref_new(Expr init);
  static Expr deref(Expr target);
  static Expr assign(Expr target, Expr value);
  static Expr barrier(BarrierKind kind);

  /// let x = bound in body, i.e. ((\x. body) bound)
  static Expr let(std::string x, Expr bound, Expr body);

  Kind kind() const;
  bool is_value() const { return kind() <= Kind::kIdent; }
  /// No identifier anywhere inside.
  bool is_pure() const;
  /// Closed, identifier-free, and no allocated location inside: its
  /// canonical form is independent of the surrounding configuration.
  bool is_ground() const;
  /// Memo slot for the canonical digest of a ground term; 0 when unset.
  std::uint64_t digest() const;
  void set_digest(std::uint64_t d) const;

  // Kind-specific accessors; calling one on the wrong kind is a logic error.
  const std::string& var_name() const;
  const std::string& param() const;
  const Expr& body() const;
  const RefName& ref_name() const;
  const IdentName& ident_name() const;
  const Expr& fun() const;
  const Expr& arg() const;
  const Expr& cond() const;
  const Expr& then_branch() const;
  const Expr& else_branch() const;
  const Expr& init() const;
  const Expr& target() const;
  const Expr& value() const;
  const BarrierKind& barrier_kind() const;

  bool same_node(const Expr& o) const { return node_ == o.node_; }
  bool has_free_var(std::string_view x) const;

  /// Structural equality on names (not up to alpha).
  friend bool operator==(const Expr& a, const Expr& b);
  friend std::set<std::string> free_vars(const Expr& e);
  friend bool is_closed(const Expr& e);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  Kind kind;
  std::string text;  // variable name, lambda parameter, or barrier kind
  RefName ref;
  IdentName ident;
  Expr a, b, c;
  bool pure = true;
  bool fixed = true;  // no allocated location inside
  std::vector<std::string> free;  // sorted free variables
  mutable std::atomic<std::uint64_t> digest{0};
};

inline Expr::Kind Expr::kind() const { return node_->kind; }
inline bool Expr::is_pure() const { return node_->pure; }
inline bool Expr::is_ground() const { return node_->pure && node_->fixed && node_->free.empty(); }
inline std::uint64_t Expr::digest() const { return node_->digest.load(std::memory_order_relaxed); }
inline void Expr::set_digest(std::uint64_t d) const { node_->digest.store(d, std::memory_order_relaxed); }

inline const std::string& Expr::var_name() const { return node_->text; }
inline const std::string& Expr::param() const { return node_->text; }
inline const Expr& Expr::body() const { return node_->a; }
inline const RefName& Expr::ref_name() const { return node_->ref; }
inline const IdentName& Expr::ident_name() const { return node_->ident; }
inline const Expr& Expr::fun() const { return node_->a; }
inline const Expr& Expr::arg() const { return node_->b; }
inline const Expr& Expr::cond() const { return node_->a; }
inline const Expr& Expr::then_branch() const { return node_->b; }
inline const Expr& Expr::else_branch() const { return node_->c; }
inline const Expr& Expr::init() const { return node_->a; }
inline const Expr& Expr::target() const { return node_->a; }
inline const Expr& Expr::value() const { return node_->b; }
inline const BarrierKind& Expr::barrier_kind() const { return node_->text; }

std::set<std::string> free_vars(const Expr& e);
bool is_closed(const Expr& e);
/// Every App/If/RefNew/Deref/Assign operand that must be a value is one.
bool is_anf(const Expr& e);

bool alpha_equal(const Expr& a, const Expr& b);

/// Capture-avoiding substitution of v for the free occurrences of x.
Expr subst_var(const Expr& e, std::string_view x, const Expr& v);

/// Replace every occurrence of identifier id by v.
Expr subst_ident(const Expr& e, const IdentName& id, const Expr& v);

/// Visit every identifier occurring in e.
template <typename F>
void for_each_ident(const Expr& e, F&& f);

/// Stack of pending (v []) frames, outermost first.
struct EvalContext {
  std::vector<Expr> frames;
};

Expr plug(const EvalContext& ctx, Expr e);

enum class BlockReason {
  kUnresolvedCondition,
  kUnresolvedFunction,
  kFreeVariable,
  kTypeError,
};

struct Decomposition {
  enum class Kind { kValue, kRedex, kBlocked };
  Kind kind;
  EvalContext context;
  Expr focus;  // the value, the redex, or the blocked subterm
  BlockReason reason = BlockReason::kTypeError;
};

Decomposition decompose(const Expr& e);

std::string to_string(BlockReason r);
std::string to_string(const Expr& e);

// ---- template implementation

template <typename F>
void for_each_ident(const Expr& e, F&& f) {
  if (e.is_pure()) return;
  switch (e.kind()) {
    case Expr::Kind::kIdent:
      f(e.ident_name());
      return;
    case Expr::Kind::kLambda:
      for_each_ident(e.body(), f);
      return;
    case Expr::Kind::kApp:
      for_each_ident(e.fun(), f);
      for_each_ident(e.arg(), f);
      return;
    case Expr::Kind::kIf:
      for_each_ident(e.cond(), f);
      for_each_ident(e.then_branch(), f);
      for_each_ident(e.else_branch(), f);
      return;
    case Expr::Kind::kRefNew:
      for_each_ident(e.init(), f);
      return;
    case Expr::Kind::kDeref:
      for_each_ident(e.target(), f);
      return;
    case Expr::Kind::kAssign:
      for_each_ident(e.target(), f);
      for_each_ident(e.value(), f);
      return;
    default:
      return;
  }
}

}  // namespace rmm
