#include "faultsort/sequence.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace faultsort {

Sequence::Sequence(std::vector<std::int64_t> items) : items_(std::move(items)) {}

Sequence Sequence::identity(std::int64_t n) {
  std::vector<std::int64_t> items(static_cast<std::size_t>(n));
  std::iota(items.begin(), items.end(), std::int64_t{1});
  return Sequence(std::move(items));
}

void Sequence::ensure_index() const {
  if (indexed_) return;
  index_.clear();
  index_.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    index_.emplace(items_[i], static_cast<std::int64_t>(i));
  }
  indexed_ = true;
}

std::int64_t Sequence::position_of(std::int64_t value) const {
  ensure_index();
  auto it = index_.find(value);
  return it == index_.end() ? -1 : it->second;
}

void Sequence::validate_distinct() const {
  std::vector<std::int64_t> sorted = items_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("Sequence: elements must be pairwise distinct");
  }
}

DislocationReport dislocation_report(const Sequence& seq, bool per_element) {
  const auto& items = seq.items();
  std::vector<std::int64_t> sorted = items;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("dislocation_report: duplicate elements");
  }

  DislocationReport report;
  if (per_element) report.per_element.resize(items.size());
  for (std::size_t pos = 0; pos < items.size(); ++pos) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), items[pos]);
    const std::int64_t rank0 = it - sorted.begin();  // rank - 1
    const std::int64_t d = std::llabs(static_cast<std::int64_t>(pos) - rank0);
    report.total_dislocation += d;
    report.max_dislocation = std::max(report.max_dislocation, d);
    if (per_element) report.per_element[pos] = d;
  }
  return report;
}

}  // namespace faultsort
