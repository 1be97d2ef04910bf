#include "rmm/term.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace rmm {

namespace {

using Kind = Expr::Kind;

void merge_free(std::vector<std::string>& into, const std::vector<std::string>& from) {
  if (from.empty()) return;
  std::vector<std::string> out;
  out.reserve(into.size() + from.size());
  std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(out));
  into = std::move(out);
}

[[noreturn]] void anf_violation(const char* what) {
  throw std::invalid_argument(std::string("ANF violation: ") + what + " must be a value");
}

}  // namespace

Expr Expr::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kVar;
  n->free = {name};
  n->text = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::lambda(std::string param, Expr body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kLambda;
  n->pure = body.is_pure();
  n->fixed = body.node_->fixed;
  n->free = body.node_->free;
  std::erase(n->free, param);
  n->text = std::move(param);
  n->a = std::move(body);
  return Expr(std::move(n));
}

#define RMM_CONST_NODE(K)                     \
  static const auto n = [] {                  \
    auto m = std::make_shared<Node>();        \
    m->kind = K;                              \
    return std::shared_ptr<const Node>(m);    \
  }();                                        \
  return Expr(n)

Expr Expr::tt() { RMM_CONST_NODE(Kind::kTrue); }
Expr Expr::ff() { RMM_CONST_NODE(Kind::kFalse); }
Expr Expr::unit() { RMM_CONST_NODE(Kind::kUnit); }

#undef RMM_CONST_NODE

Expr Expr::ref(RefName r) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kRef;
  n->fixed = !r.is_dynamic();
  n->ref = std::move(r);
  return Expr(std::move(n));
}

Expr Expr::ident(IdentName i) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kIdent;
  n->ident = i;
  n->pure = false;
  return Expr(std::move(n));
}

Expr Expr::app(Expr fun, Expr arg) {
  if (!fun.is_value()) anf_violation("function position");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kApp;
  n->pure = fun.is_pure() && arg.is_pure();
  n->fixed = fun.node_->fixed && arg.node_->fixed;
  n->free = fun.node_->free;
  merge_free(n->free, arg.node_->free);
  n->a = std::move(fun);
  n->b = std::move(arg);
  return Expr(std::move(n));
}

Expr Expr::if_(Expr cond, Expr then_branch, Expr else_branch) {
  if (!cond.is_value()) anf_violation("condition");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kIf;
  n->pure = cond.is_pure() && then_branch.is_pure() && else_branch.is_pure();
  n->fixed = cond.node_->fixed && then_branch.node_->fixed && else_branch.node_->fixed;
  n->free = cond.node_->free;
  merge_free(n->free, then_branch.node_->free);
  merge_free(n->free, else_branch.node_->free);
  n->a = std::move(cond);
  n->b = std::move(then_branch);
  n->c = std::move(else_branch);
  return Expr(std::move(n));
}

Expr Expr::ref_new(Expr init) {
  if (!init.is_value()) anf_violation("ref operand");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kRefNew;
  n->pure = init.is_pure();
  n->fixed = init.node_->fixed;
  n->free = init.node_->free;
  n->a = std::move(init);
  return Expr(std::move(n));
}

Expr Expr::deref(Expr target) {
  if (!target.is_value()) anf_violation("dereference operand");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kDeref;
  n->pure = target.is_pure();
  n->fixed = target.node_->fixed;
  n->free = target.node_->free;
  n->a = std::move(target);
  return Expr(std::move(n));
}

Expr Expr::assign(Expr target, Expr value) {
  if (!target.is_value()) anf_violation("assignment target");
  if (!value.is_value()) anf_violation("assigned operand");
  auto n = std::make_shared<Node>();
  n->kind = Kind::kAssign;
  n->pure = target.is_pure() && value.is_pure();
  n->fixed = target.node_->fixed && value.node_->fixed;
  n->free = target.node_->free;
  merge_free(n->free, value.node_->free);
  n->a = std::move(target);
  n->b = std::move(value);
  return Expr(std::move(n));
}

Expr Expr::barrier(BarrierKind kind) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kBarrier;
  n->text = std::move(kind);
  return Expr(std::move(n));
}

Expr Expr::let(std::string x, Expr bound, Expr body) {
  return app(lambda(std::move(x), std::move(body)), std::move(bound));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Kind::kVar:
    case Kind::kBarrier:
      return x.text == y.text;
    case Kind::kLambda:
      return x.text == y.text && x.a == y.a;
    case Kind::kTrue:
    case Kind::kFalse:
    case Kind::kUnit:
      return true;
    case Kind::kRef:
      return x.ref == y.ref;
    case Kind::kIdent:
      return x.ident == y.ident;
    case Kind::kApp:
    case Kind::kAssign:
      return x.a == y.a && x.b == y.b;
    case Kind::kIf:
      return x.a == y.a && x.b == y.b && x.c == y.c;
    case Kind::kRefNew:
    case Kind::kDeref:
      return x.a == y.a;
  }
  return false;
}

std::set<std::string> free_vars(const Expr& e) {
  const auto& f = e.node_->free;
  return {f.begin(), f.end()};
}

bool Expr::has_free_var(std::string_view x) const {
  return std::binary_search(node_->free.begin(), node_->free.end(), x, std::less<>{});
}

bool is_closed(const Expr& e) { return e.node_->free.empty(); }

bool is_anf(const Expr& e) {
  switch (e.kind()) {
    case Kind::kLambda:
      return is_anf(e.body());
    case Kind::kApp:
      return e.fun().is_value() && is_anf(e.fun()) && is_anf(e.arg());
    case Kind::kIf:
      return e.cond().is_value() && is_anf(e.then_branch()) && is_anf(e.else_branch());
    case Kind::kRefNew:
      return e.init().is_value() && is_anf(e.init());
    case Kind::kDeref:
      return e.target().is_value();
    case Kind::kAssign:
      return e.target().is_value() && e.value().is_value() && is_anf(e.value());
    default:
      return true;
  }
}

namespace {

bool alpha_eq(const Expr& a, const Expr& b, std::vector<std::string>& la,
              std::vector<std::string>& lb) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Kind::kVar: {
      // Innermost binding wins; compare binder depth, else free names.
      auto ia = std::find(la.rbegin(), la.rend(), a.var_name());
      auto ib = std::find(lb.rbegin(), lb.rend(), b.var_name());
      bool fa = ia == la.rend();
      bool fb = ib == lb.rend();
      if (fa || fb) return fa && fb && a.var_name() == b.var_name();
      return std::distance(la.rbegin(), ia) == std::distance(lb.rbegin(), ib);
    }
    case Kind::kLambda: {
      la.push_back(a.param());
      lb.push_back(b.param());
      bool r = alpha_eq(a.body(), b.body(), la, lb);
      la.pop_back();
      lb.pop_back();
      return r;
    }
    case Kind::kTrue:
    case Kind::kFalse:
    case Kind::kUnit:
      return true;
    case Kind::kRef:
      return a.ref_name() == b.ref_name();
    case Kind::kIdent:
      return a.ident_name() == b.ident_name();
    case Kind::kBarrier:
      return a.barrier_kind() == b.barrier_kind();
    case Kind::kApp:
      return alpha_eq(a.fun(), b.fun(), la, lb) && alpha_eq(a.arg(), b.arg(), la, lb);
    case Kind::kAssign:
      return alpha_eq(a.target(), b.target(), la, lb) && alpha_eq(a.value(), b.value(), la, lb);
    case Kind::kIf:
      return alpha_eq(a.cond(), b.cond(), la, lb) &&
             alpha_eq(a.then_branch(), b.then_branch(), la, lb) &&
             alpha_eq(a.else_branch(), b.else_branch(), la, lb);
    case Kind::kRefNew:
      return alpha_eq(a.init(), b.init(), la, lb);
    case Kind::kDeref:
      return alpha_eq(a.target(), b.target(), la, lb);
  }
  return false;
}

std::string fresh_variant(const std::string& base, const std::set<std::string>& avoid) {
  for (int k = 1;; ++k) {
    std::string cand = base + "'" + std::to_string(k);
    if (!avoid.contains(cand)) return cand;
  }
}

}  // namespace

bool alpha_equal(const Expr& a, const Expr& b) {
  std::vector<std::string> la, lb;
  return alpha_eq(a, b, la, lb);
}

Expr subst_var(const Expr& e, std::string_view x, const Expr& v) {
  if (!e.has_free_var(x)) return e;
  switch (e.kind()) {
    case Kind::kVar:
      return v;  // has_free implies the name matches
    case Kind::kLambda: {
      const std::string& y = e.param();
      if (v.has_free_var(y)) {
        std::set<std::string> avoid = free_vars(v);
        auto fb = free_vars(e.body());
        avoid.insert(fb.begin(), fb.end());
        avoid.insert(std::string(x));
        std::string z = fresh_variant(y, avoid);
        Expr renamed = subst_var(e.body(), y, Expr::var(z));
        return Expr::lambda(z, subst_var(renamed, x, v));
      }
      return Expr::lambda(y, subst_var(e.body(), x, v));
    }
    case Kind::kApp:
      return Expr::app(subst_var(e.fun(), x, v), subst_var(e.arg(), x, v));
    case Kind::kIf:
      return Expr::if_(subst_var(e.cond(), x, v), subst_var(e.then_branch(), x, v),
                       subst_var(e.else_branch(), x, v));
    case Kind::kRefNew:
      return Expr::ref_new(subst_var(e.init(), x, v));
    case Kind::kDeref:
      return Expr::deref(subst_var(e.target(), x, v));
    case Kind::kAssign:
      return Expr::assign(subst_var(e.target(), x, v), subst_var(e.value(), x, v));
    default:
      return e;
  }
}

// Untouched subterms keep their node.
Expr subst_ident(const Expr& e, const IdentName& id, const Expr& v) {
  if (e.is_pure()) return e;
  auto sub = [&](const Expr& x) { return subst_ident(x, id, v); };
  switch (e.kind()) {
    case Kind::kIdent:
      return e.ident_name() == id ? v : e;
    case Kind::kLambda: {
      Expr b = sub(e.body());
      return b.same_node(e.body()) ? e : Expr::lambda(e.param(), std::move(b));
    }
    case Kind::kApp: {
      Expr f = sub(e.fun());
      Expr a = sub(e.arg());
      if (f.same_node(e.fun()) && a.same_node(e.arg())) return e;
      return Expr::app(std::move(f), std::move(a));
    }
    case Kind::kIf: {
      Expr c = sub(e.cond());
      Expr t = sub(e.then_branch());
      Expr f = sub(e.else_branch());
      if (c.same_node(e.cond()) && t.same_node(e.then_branch()) && f.same_node(e.else_branch())) return e;
      return Expr::if_(std::move(c), std::move(t), std::move(f));
    }
    case Kind::kRefNew: {
      Expr i = sub(e.init());
      return i.same_node(e.init()) ? e : Expr::ref_new(std::move(i));
    }
    case Kind::kDeref: {
      Expr t = sub(e.target());
      return t.same_node(e.target()) ? e : Expr::deref(std::move(t));
    }
    case Kind::kAssign: {
      Expr t = sub(e.target());
      Expr x = sub(e.value());
      if (t.same_node(e.target()) && x.same_node(e.value())) return e;
      return Expr::assign(std::move(t), std::move(x));
    }
    default:
      return e;
  }
}

Expr plug(const EvalContext& ctx, Expr e) {
  for (auto it = ctx.frames.rbegin(); it != ctx.frames.rend(); ++it) e = Expr::app(*it, std::move(e));
  return e;
}

Decomposition decompose(const Expr& e) {
  Decomposition d{Decomposition::Kind::kValue, {}, e};
  Expr cur = e;
  auto blocked = [&](BlockReason r) {
    d.kind = Decomposition::Kind::kBlocked;
    d.focus = cur;
    d.reason = r;
    return d;
  };
  auto redex = [&]() {
    d.kind = Decomposition::Kind::kRedex;
    d.focus = cur;
    return d;
  };
  auto is_location = [](const Expr& v) {
    return v.kind() == Kind::kRef || v.kind() == Kind::kIdent;
  };
  auto unusable = [](const Expr& v) {
    if (v.kind() == Kind::kIdent) return BlockReason::kUnresolvedFunction;
    if (v.kind() == Kind::kVar) return BlockReason::kFreeVariable;
    return BlockReason::kTypeError;
  };
  for (;;) {
    switch (cur.kind()) {
      case Kind::kApp:
        if (!cur.arg().is_value()) {
          d.context.frames.push_back(cur.fun());
          Expr next = cur.arg();
          cur = std::move(next);
          continue;
        }
        if (cur.fun().kind() == Kind::kLambda) return redex();
        return blocked(unusable(cur.fun()));
      case Kind::kIf:
        if (cur.cond().kind() == Kind::kTrue || cur.cond().kind() == Kind::kFalse) return redex();
        if (cur.cond().kind() == Kind::kIdent) return blocked(BlockReason::kUnresolvedCondition);
        return blocked(cur.cond().kind() == Kind::kVar ? BlockReason::kFreeVariable
                                                       : BlockReason::kTypeError);
      case Kind::kRefNew:
      case Kind::kBarrier:
        return redex();
      case Kind::kDeref:
      case Kind::kAssign:
        if (is_location(cur.target())) return redex();
        return blocked(cur.target().kind() == Kind::kVar ? BlockReason::kFreeVariable
                                                         : BlockReason::kTypeError);
      default:
        // A value; only reachable at the top since values are never descended into.
        d.focus = cur;
        return d;
    }
  }
}

namespace {

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Kind::kVar:
      out += e.var_name();
      return;
    case Kind::kLambda:
      out += "\\";
      out += e.param();
      out += ".";
      print(e.body(), out);
      return;
    case Kind::kTrue:
      out += "true";
      return;
    case Kind::kFalse:
      out += "false";
      return;
    case Kind::kUnit:
      out += "()";
      return;
    case Kind::kRef:
      out += e.ref_name().name;
      return;
    case Kind::kIdent:
      out += to_string(e.ident_name());
      return;
    case Kind::kApp:
      out += "(";
      print(e.fun(), out);
      out += " ";
      print(e.arg(), out);
      out += ")";
      return;
    case Kind::kIf:
      out += "(if ";
      print(e.cond(), out);
      out += " then ";
      print(e.then_branch(), out);
      out += " else ";
      print(e.else_branch(), out);
      out += ")";
      return;
    case Kind::kRefNew:
      out += "(ref ";
      print(e.init(), out);
      out += ")";
      return;
    case Kind::kDeref:
      out += "!";
      print(e.target(), out);
      return;
    case Kind::kAssign:
      out += "(";
      print(e.target(), out);
      out += " := ";
      print(e.value(), out);
      out += ")";
      return;
    case Kind::kBarrier:
      out += e.barrier_kind();
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

std::string to_string(BlockReason r) {
  switch (r) {
    case BlockReason::kUnresolvedCondition:
      return "unresolved condition";
    case BlockReason::kUnresolvedFunction:
      return "unresolved function";
    case BlockReason::kFreeVariable:
      return "free variable";
    case BlockReason::kTypeError:
      return "type error";
  }
  return "?";
}

std::string to_string(ThreadId t) { return "t" + std::to_string(t.value); }

std::string to_string(ThreadSet s) {
  std::string out = "{";
  bool first = true;
  for (ThreadId t : s.members()) {
    if (!first) out += ",";
    out += to_string(t);
    first = false;
  }
  return out + "}";
}

std::string to_string(const IdentName& i) {
  return "ι" + std::to_string(i.thread) + "." + std::to_string(i.index);
}

}  // namespace rmm
