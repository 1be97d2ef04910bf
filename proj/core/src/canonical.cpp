#include "rmm/canonical.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string_view>

namespace rmm {

// Keys are only compared and hashed, so numbers go out as a single byte when
// small and as a marker plus eight bytes otherwise.
void CanonicalWriter::number(std::size_t n) {
  if (n < 0xF0) {
    token(static_cast<char>(n));
    return;
  }
  token(static_cast<char>(0xF0));
  std::uint64_t v = n;
  token(std::string_view(reinterpret_cast<const char*>(&v), sizeof v));
}

void CanonicalWriter::expr(const Expr& e) {
  binders_.clear();
  expr(e, binders_);
}

void CanonicalWriter::grow(std::size_t extra) { buf_.resize(std::max(buf_.size() * 2, len_ + extra)); }

void CanonicalWriter::reset() {
  len_ = 0;
  refs_.clear();
  idents_.clear();
  pending_.clear();
  pending_head_ = 0;
}

void CanonicalWriter::ref(const RefName& r) {
  if (!r.is_dynamic()) {
    token(r.name);
    return;
  }
  int idx = ref_index(r);
  if (idx < 0) {
    idx = static_cast<int>(refs_.size());
    refs_.push_back(r.name);
    pending_.push_back(r);
  }
  token('@');
  number(static_cast<std::size_t>(idx));
}

void CanonicalWriter::reserve(const RefName& r) {
  if (ref_index(r) >= 0) return;
  refs_.push_back(r.name);
  pending_.push_back(r);
}

void CanonicalWriter::ident(const IdentName& i) {
  int idx = ident_index(i);
  if (idx < 0) {
    idx = static_cast<int>(idents_.size());
    idents_.push_back(i);
  }
  token('?');
  number(static_cast<std::size_t>(idx));
}

void CanonicalWriter::thread_set(ThreadSet s) {
  token('{');
  number(s.bits());
  token('}');
}

RefName CanonicalWriter::pop_pending_ref() {
  return pending_[pending_head_++];
}

int CanonicalWriter::ref_index(const RefName& r) const {
  for (std::size_t k = 0; k < refs_.size(); ++k)
    if (refs_[k] == r.name) return static_cast<int>(k);
  return -1;
}

int CanonicalWriter::ident_index(const IdentName& i) const {
  for (std::size_t k = 0; k < idents_.size(); ++k)
    if (idents_[k] == i) return static_cast<int>(k);
  return -1;
}

// Ground subterms (mostly untouched thread continuations) are written once
// and afterwards stand in as a digest.
void CanonicalWriter::expr(const Expr& e, std::vector<const std::string*>& binders) {
  if (e.kind() < Expr::Kind::kApp && e.kind() != Expr::Kind::kLambda) {
    plain(e, binders);
    return;
  }
  if (!e.is_ground()) {
    plain(e, binders);
    return;
  }
  std::uint64_t d = e.digest();
  if (d == 0) {
    CanonicalWriter sub;
    std::vector<const std::string*> own;
    sub.plain(e, own);
    d = std::hash<std::string_view>{}(sub.text()) | 1;
    e.set_digest(d);
  }
  digest(d);
}

void CanonicalWriter::plain(const Expr& e, std::vector<const std::string*>& binders) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::kVar: {
      auto it = std::find_if(binders.rbegin(), binders.rend(),
                             [&](const std::string* b) { return *b == e.var_name(); });
      if (it == binders.rend()) {
        token("v:");
        token(e.var_name());
      } else {
        token('#');
        number(static_cast<std::size_t>(std::distance(binders.rbegin(), it)));
      }
      return;
    }
    case K::kLambda:
      token("L(");
      binders.push_back(&e.param());
      expr(e.body(), binders);
      binders.pop_back();
      token(')');
      return;
    case K::kTrue:
      token('T');
      return;
    case K::kFalse:
      token('F');
      return;
    case K::kUnit:
      token('U');
      return;
    case K::kRef:
      ref(e.ref_name());
      return;
    case K::kIdent:
      ident(e.ident_name());
      return;
    case K::kApp:
      token("A(");
      expr(e.fun(), binders);
      token(',');
      expr(e.arg(), binders);
      token(')');
      return;
    case K::kIf:
      token("I(");
      expr(e.cond(), binders);
      token(',');
      expr(e.then_branch(), binders);
      token(',');
      expr(e.else_branch(), binders);
      token(')');
      return;
    case K::kRefNew:
      token("N(");
      expr(e.init(), binders);
      token(')');
      return;
    case K::kDeref:
      token("D(");
      expr(e.target(), binders);
      token(')');
      return;
    case K::kAssign:
      token("S(");
      expr(e.target(), binders);
      token(',');
      expr(e.value(), binders);
      token(')');
      return;
    case K::kBarrier:
      token("B:");
      token(e.barrier_kind());
      return;
  }
}

}  // namespace rmm
