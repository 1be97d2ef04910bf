#include "rmm/store.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "rmm/canonical.hpp"

namespace rmm {

Store::Store(std::initializer_list<value_type> init) {
  for (const auto& [r, v] : init) insert_or_assign(r, v);
}

const std::vector<Store::value_type>& Store::items() const {
  static const std::vector<value_type> kEmpty;
  return data_ ? data_->items : kEmpty;
}

void Store::commit(std::vector<value_type> items) {
  auto d = std::make_shared<Data>();
  d->items = std::move(items);
  d->ground = std::all_of(d->items.begin(), d->items.end(),
                          [](const value_type& e) { return !e.first.is_dynamic() && e.second.is_ground(); });
  data_ = std::move(d);
}

namespace {
template <typename V>
auto lower(V& v, const RefName& r) {
  return std::lower_bound(v.begin(), v.end(), r, [](const auto& e, const RefName& k) { return e.first < k; });
}
}  // namespace

Store::const_iterator Store::find(const RefName& r) const {
  const auto& v = items();
  auto it = lower(v, r);
  return it != v.end() && it->first == r ? it : v.end();
}

const Expr& Store::at(const RefName& r) const {
  auto it = find(r);
  if (it == end()) throw std::out_of_range("no location " + r.name);
  return it->second;
}

std::pair<Store::const_iterator, bool> Store::emplace(RefName r, Expr v) {
  if (auto it = find(r); it != end()) return {it, false};
  std::vector<value_type> next = items();
  auto where = lower(next, r);
  auto pos = next.insert(where, value_type{std::move(r), std::move(v)});
  const std::ptrdiff_t at = pos - next.begin();
  commit(std::move(next));
  return {begin() + at, true};
}

void Store::insert_or_assign(RefName r, Expr v) {
  std::vector<value_type> next = items();
  auto pos = lower(next, r);
  if (pos != next.end() && pos->first == r)
    pos->second = std::move(v);
  else
    next.insert(pos, value_type{std::move(r), std::move(v)});
  commit(std::move(next));
}

bool operator==(const Store& a, const Store& b) {
  if (a.data_ == b.data_) return true;
  return a.items() == b.items();
}

namespace {

Expr rename_refs(const Expr& e, const std::map<std::string, std::string>& names) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::kRef: {
      auto it = names.find(e.ref_name().name);
      if (it == names.end()) return e;
      return Expr::ref(RefName{it->second, e.ref_name().is_register});
    }
    case K::kLambda:
      return Expr::lambda(e.param(), rename_refs(e.body(), names));
    case K::kApp:
      return Expr::app(rename_refs(e.fun(), names), rename_refs(e.arg(), names));
    case K::kIf:
      return Expr::if_(rename_refs(e.cond(), names), rename_refs(e.then_branch(), names),
                       rename_refs(e.else_branch(), names));
    case K::kRefNew:
      return Expr::ref_new(rename_refs(e.init(), names));
    case K::kDeref:
      return Expr::deref(rename_refs(e.target(), names));
    case K::kAssign:
      return Expr::assign(rename_refs(e.target(), names), rename_refs(e.value(), names));
    default:
      return e;
  }
}

// Writes the store in canonical order and reports the allocation order.
void write_store(const Store& s, CanonicalWriter& w, std::vector<RefName>* order) {
  auto drain = [&] {
    while (w.has_pending_ref()) {
      RefName r = w.pop_pending_ref();
      if (order) order->push_back(r);
      auto it = s.find(r);
      if (it == s.end()) continue;
      w.ref(r);
      w.token('=');
      w.expr(it->second);
      w.token(';');
    }
  };
  for (const auto& [name, value] : s) {
    if (name.is_dynamic()) continue;
    w.token(name.name);
    w.token('=');
    w.expr(value);
    w.token(';');
    drain();
  }
  for (const auto& [name, value] : s) {
    if (!name.is_dynamic() || w.seen(name)) continue;
    w.reserve(name);
    drain();
  }
}

}  // namespace

bool store_is_pure(const Store& s) {
  for (const auto& [k, v] : s)
    if (!v.is_pure()) return false;
  return true;
}

std::string store_key(const Store& s) {
  CanonicalWriter w;
  write_store(s, w, nullptr);
  return w.str();
}

Store canonical_store(const Store& s) {
  CanonicalWriter w;
  std::vector<RefName> order;
  write_store(s, w, &order);
  std::map<std::string, std::string> names;
  for (std::size_t i = 0; i < order.size(); ++i) names[order[i].name] = "@" + std::to_string(i);
  if (names.empty()) return s;
  Store result;
  for (const auto& [k, v] : s) {
    RefName key = k;
    if (auto it = names.find(k.name); it != names.end()) key.name = it->second;
    result.emplace(std::move(key), rename_refs(v, names));
  }
  return result;
}

std::string to_string(const Store& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : s) {
    if (!first) out += ", ";
    out += k.name + "=" + to_string(v);
    first = false;
  }
  return out + "}";
}

bool OutcomeSet::insert(const Store& s) {
  std::string key = store_key(s);
  if (items_.contains(key)) return false;
  items_.emplace(std::move(key), canonical_store(s));
  return true;
}

void OutcomeSet::merge(const OutcomeSet& other) {
  for (const auto& [k, v] : other.items_) items_.try_emplace(k, v);
}

std::vector<Store> OutcomeSet::stores() const {
  std::vector<Store> out;
  out.reserve(items_.size());
  for (const auto& [k, v] : items_) out.push_back(v);
  return out;
}

std::vector<std::string> OutcomeSet::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : items_) out.push_back(k);
  return out;
}

bool OutcomeSet::subset_of(const OutcomeSet& other) const {
  for (const auto& [k, v] : items_)
    if (!other.items_.contains(k)) return false;
  return true;
}

}  // namespace rmm
