#pragma once

#include <cstdint>
#include <string_view>
#include <string>
#include <vector>

#include "rmm/names.hpp"
#include "rmm/term.hpp"

namespace rmm {

/// Renames run-time allocated locations and read identifiers on first
/// occurrence, and writes terms with bound variables as binder depths, so
/// that two renaming-equivalent objects serialize identically.
class CanonicalWriter {
 public:
  CanonicalWriter() { buf_.resize(256); }

  void expr(const Expr& e);
  void ref(const RefName& r);
  /// Assign the next index to an allocated location without writing it.
  void reserve(const RefName& r);
  void ident(const IdentName& i);
  void thread_set(ThreadSet s);
  void token(std::string_view s) {
    if (len_ + s.size() > buf_.size()) grow(s.size());
    s.copy(buf_.data() + len_, s.size());
    len_ += s.size();
  }
  /// Stands for text written by another writer: `$` and the 64-bit digest.
  void digest(std::uint64_t d) {
    token('$');
    token(std::string_view(reinterpret_cast<const char*>(&d), sizeof d));
  }
  void token(char c) {
    if (len_ == buf_.size()) grow(1);
    buf_[len_++] = c;
  }
  void number(std::size_t n);
  /// Forget all renamings and clear the output, keeping allocations.
  void reset();

  std::string_view text() const { return {buf_.data(), len_}; }
  std::string str() const { return std::string(text()); }

  /// Allocated locations seen so far whose contents have not been written.
  bool has_pending_ref() const { return pending_head_ < pending_.size(); }
  RefName pop_pending_ref();

  int ref_index(const RefName& r) const;
  int ident_index(const IdentName& i) const;
  bool seen(const IdentName& i) const { return ident_index(i) >= 0; }
  bool seen(const RefName& r) const { return ref_index(r) >= 0; }

 private:
  void expr(const Expr& e, std::vector<const std::string*>& binders);
  void plain(const Expr& e, std::vector<const std::string*>& binders);

  void grow(std::size_t extra);

  std::string buf_;
  std::size_t len_ = 0;
  // Few names per configuration: linear search beats a tree here.
  std::vector<std::string> refs_;
  std::vector<IdentName> idents_;
  std::vector<RefName> pending_;
  std::size_t pending_head_ = 0;
  std::vector<const std::string*> binders_;
};

}  // namespace rmm
