#include "faultsort/sampling.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace faultsort {

void fisher_yates_inplace(std::vector<std::int64_t>& items, SplitRng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::uint64_t j = sample_uniform_int(rng, static_cast<std::uint64_t>(i));
    std::swap(items[i - 1], items[j]);
  }
}

Sequence fisher_yates(const Sequence& seq, SplitRng& rng) {
  std::vector<std::int64_t> items = seq.items();
  fisher_yates_inplace(items, rng);
  return Sequence(std::move(items));
}

Sequence adversarial_order(const FaultModel& model, std::int64_t n, std::int64_t cap,
                           CompStats* stats) {
  if (n < 1) throw std::invalid_argument("adversarial_order: n must be >= 1");
  if (n > cap) {
    throw std::invalid_argument("adversarial_order: n exceeds the tournament cap " +
                                std::to_string(cap));
  }
  CompStats local;
  detail::Oracle oracle{&model, stats ? stats : &local};

  std::vector<std::int64_t> wins(static_cast<std::size_t>(n), 0);
  for (std::int64_t lo = 1; lo < n; ++lo) {
    for (std::int64_t hi = lo + 1; hi <= n; ++hi) {
      if (oracle.reports_larger(lo, hi)) {
        ++wins[static_cast<std::size_t>(lo - 1)];
      } else {
        ++wins[static_cast<std::size_t>(hi - 1)];
      }
    }
  }

  std::vector<std::int64_t> order(static_cast<std::size_t>(n));
  for (std::int64_t v = 1; v <= n; ++v) order[static_cast<std::size_t>(v - 1)] = v;
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    const std::int64_t wa = wins[static_cast<std::size_t>(a - 1)];
    const std::int64_t wb = wins[static_cast<std::size_t>(b - 1)];
    if (wa != wb) return wa > wb;
    return a < b;
  });
  return Sequence(std::move(order));
}

}  // namespace faultsort
