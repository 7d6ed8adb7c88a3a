#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace faultsort {

// An ordered sequence of distinct integer elements. Positions are 0-based in
// code; ranks reported to callers are 1-based (rank(x) = 1 + #{y in S : y < x}).
// The inverse value->position index is built lazily; call ensure_index()
// before sharing one instance across threads.
class Sequence {
 public:
  Sequence() = default;
  explicit Sequence(std::vector<std::int64_t> items);

  // The sequence 1, 2, ..., n.
  static Sequence identity(std::int64_t n);

  std::int64_t size() const { return static_cast<std::int64_t>(items_.size()); }
  bool empty() const { return items_.empty(); }
  std::int64_t operator[](std::int64_t pos) const { return items_[static_cast<std::size_t>(pos)]; }
  const std::vector<std::int64_t>& items() const { return items_; }

  // 0-based position of value, or -1 if absent.
  std::int64_t position_of(std::int64_t value) const;
  bool contains(std::int64_t value) const { return position_of(value) >= 0; }
  void ensure_index() const;

  // Throws if elements are not pairwise distinct.
  void validate_distinct() const;

  bool operator==(const Sequence& other) const { return items_ == other.items_; }

 private:
  std::vector<std::int64_t> items_;
  mutable std::unordered_map<std::int64_t, std::int64_t> index_;
  mutable bool indexed_ = false;
};

struct DislocationReport {
  std::int64_t max_dislocation = 0;
  std::int64_t total_dislocation = 0;
  std::vector<std::int64_t> per_element;  // filled only when requested
};

// disl(x) = |pos(x) - rank(x)| with ranks taken within the sequence itself.
// O(m log m); throws on duplicate elements.
DislocationReport dislocation_report(const Sequence& seq, bool per_element = false);

}  // namespace faultsort
