#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace rmm {

/// Index of a thread in the program's thread pool (dense, declaration order).
struct ThreadId {
  int value = 0;
  auto operator<=>(const ThreadId&) const = default;
};

/// A set of threads, used for write visibilities. At most 64 threads.
class ThreadSet {
 public:
  static constexpr int kMaxThreads = 64;

  constexpr ThreadSet() = default;
  constexpr explicit ThreadSet(std::uint64_t bits) : bits_(bits) {}

  static ThreadSet single(ThreadId t) { return ThreadSet(std::uint64_t{1} << t.value); }
  /// {t0, ..., t(n-1)}
  static ThreadSet first_n(int n) {
    return ThreadSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }

  bool contains(ThreadId t) const { return (bits_ >> t.value) & 1U; }
  bool empty() const { return bits_ == 0; }
  int size() const { return std::popcount(bits_); }
  std::uint64_t bits() const { return bits_; }

  ThreadSet with(ThreadId t) const { return ThreadSet(bits_ | (std::uint64_t{1} << t.value)); }
  ThreadSet operator|(ThreadSet o) const { return ThreadSet(bits_ | o.bits_); }
  ThreadSet operator&(ThreadSet o) const { return ThreadSet(bits_ & o.bits_); }

  bool subset_of(ThreadSet o) const { return (bits_ & ~o.bits_) == 0; }
  bool strict_subset_of(ThreadSet o) const { return subset_of(o) && bits_ != o.bits_; }

  std::vector<ThreadId> members() const {
    std::vector<ThreadId> out;
    for (int i = 0; i < kMaxThreads; ++i)
      if ((bits_ >> i) & 1U) out.push_back(ThreadId{i});
    return out;
  }

  auto operator<=>(const ThreadSet&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

/// A memory location. Declared locations keep their source name; locations
/// allocated at run time are named "@<thread>.<counter>" so that independent
/// runs pick identical names.
struct RefName {
  std::string name;
  bool is_register = false;

  bool is_dynamic() const { return !name.empty() && name.front() == '@'; }

  friend bool operator==(const RefName& a, const RefName& b) { return a.name == b.name; }
  friend auto operator<=>(const RefName& a, const RefName& b) { return a.name <=> b.name; }
};

/// Placeholder for the value of a pending read, tagged by issuing thread and
/// a per-thread counter.
struct IdentName {
  int thread = 0;
  int index = 0;
  auto operator<=>(const IdentName&) const = default;
};

using BarrierKind = std::string;

std::string to_string(ThreadId t);
std::string to_string(ThreadSet s);
std::string to_string(const IdentName& i);

}  // namespace rmm
