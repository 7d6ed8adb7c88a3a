#include "faultsort/basket_sort.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "faultsort/math_util.hpp"

namespace faultsort {

ShrinkRate shrink_rate(double p, double q) {
  if (!(q >= 0.0 && q <= p && p < 0.5)) {
    throw std::domain_error("shrink_rate: need 0 <= q <= p < 1/2");
  }
  ShrinkRate rate;
  rate.admissible_low = (8.0 * p * q + 10.0 * (p - q)) / (1.0 - p - q);
  if (rate.admissible_low >= 1.0) {
    throw std::domain_error("shrink_rate: p must satisfy p < (9q+1)/(8q+11)");
  }
  rate.rho = 0.5 * (1.0 + rate.admissible_low);
  return rate;
}

double shrink_rate_with_override(double p, double q, std::optional<double> override_rho) {
  const ShrinkRate rate = shrink_rate(p, q);
  if (!override_rho) return rate.rho;
  const double rho = *override_rho;
  if (!(rho > rate.admissible_low && rho < 1.0 && rho >= 0.5 && rho <= rate.rho)) {
    throw std::domain_error(
        "shrink_rate: override must stay in the admissible band and only narrow toward 1/2");
  }
  return rho;
}

std::vector<std::int64_t> score_basket(const FaultModel& model,
                                       std::span<const std::int64_t> window, CompStats* stats) {
  CompStats local;
  detail::Oracle oracle{&model, stats ? stats : &local};
  const std::size_t len = window.size();
  std::vector<std::int64_t> scores(len, 0);
  for (std::size_t a = 0; a < len; ++a) {
    const std::int64_t va = window[a];
    for (std::size_t b = a + 1; b < len; ++b) {
      if (oracle.reports_larger(va, window[b])) {
        ++scores[a];
      } else {
        ++scores[b];
      }
    }
  }
  return scores;
}

namespace {

// One window-w round over `items`; fills tau (1-based values by position).
std::vector<std::int64_t> round_pass(detail::Oracle& oracle,
                                     const std::vector<std::int64_t>& items, std::int64_t w,
                                     std::vector<std::int64_t>& tau) {
  const std::int64_t m = static_cast<std::int64_t>(items.size());
  const std::int64_t nb = ceil_div(m, w);
  tau.assign(static_cast<std::size_t>(m), 0);

  // Uniform-p prf models take an inlined scoring loop with per-element inner
  // hashes; outcomes are bit-identical to observe().
  const detail::PrfPath* fast =
      (oracle.hook && *oracle.hook) ? nullptr : oracle.model->prf_fast_path();

  std::vector<std::int64_t> scores;
  std::vector<std::uint64_t> inner;
  std::vector<std::int32_t> order;
  std::vector<std::int32_t> pos_in_sorted;

  for (std::int64_t i = 0; i < nb; ++i) {
    const std::int64_t lo = std::max<std::int64_t>(0, i - 3) * w;
    const std::int64_t hi = std::min(std::min(i + 4, nb) * w, m);
    const std::int64_t len = hi - lo;
    const std::int64_t* vals = items.data() + lo;

    scores.assign(static_cast<std::size_t>(len), 0);
    if (fast != nullptr && fast->threshold == 0) {
      // p = 0: every outcome is truthful, so score(x) is exactly the number
      // of smaller window values. Same scores and same comparison count as
      // the pair loop, without evaluating the PRF.
      order.resize(static_cast<std::size_t>(len));
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        return vals[a] < vals[b];
      });
      for (std::int64_t r = 0; r < len; ++r) {
        scores[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r;
      }
      oracle.stats->comparisons += static_cast<std::uint64_t>(len) *
                                   static_cast<std::uint64_t>(len - 1) / 2;
    } else if (fast != nullptr) {
      const std::uint64_t key = fast->key;
      const std::uint64_t threshold = fast->threshold;
      inner.resize(static_cast<std::size_t>(len));
      for (std::int64_t a = 0; a < len; ++a) {
        inner[static_cast<std::size_t>(a)] = mix64(static_cast<std::uint64_t>(vals[a]) ^ key);
      }
      for (std::int64_t a = 0; a < len; ++a) {
        const std::int64_t va = vals[a];
        const std::uint64_t inner_a = inner[static_cast<std::size_t>(a)];
        std::int64_t wins_a = 0;
        for (std::int64_t b = a + 1; b < len; ++b) {
          const std::int64_t vb = vals[b];
          const bool a_smaller = va < vb;
          const std::uint64_t h =
              a_smaller ? mix64(static_cast<std::uint64_t>(va) ^ inner[static_cast<std::size_t>(b)])
                        : mix64(static_cast<std::uint64_t>(vb) ^ inner_a);
          const bool a_larger = a_smaller == (h < threshold);
          wins_a += a_larger;
          scores[static_cast<std::size_t>(b)] += 1 - static_cast<std::int64_t>(a_larger);
        }
        scores[static_cast<std::size_t>(a)] += wins_a;
      }
      oracle.stats->comparisons += static_cast<std::uint64_t>(len) *
                                   static_cast<std::uint64_t>(len - 1) / 2;
    } else {
      for (std::int64_t a = 0; a < len; ++a) {
        const std::int64_t va = vals[a];
        for (std::int64_t b = a + 1; b < len; ++b) {
          if (oracle.reports_larger(va, vals[b])) {
            ++scores[static_cast<std::size_t>(a)];
          } else {
            ++scores[static_cast<std::size_t>(b)];
          }
        }
      }
    }

    // A = stable sort of the window by score; stability key is the current
    // sequence order, which the window indices already carry.
    order.resize(static_cast<std::size_t>(len));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
      return scores[static_cast<std::size_t>(a)] < scores[static_cast<std::size_t>(b)];
    });
    pos_in_sorted.resize(static_cast<std::size_t>(len));
    for (std::int64_t r = 0; r < len; ++r) {
      pos_in_sorted[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] =
          static_cast<std::int32_t>(r);
    }

    // tau only for the members of basket i: max(0, i_1b - 4)*w + pos(x, A),
    // all 1-based; with 0-based basket index i that is max(0, i-3)*w.
    const std::int64_t basket_lo = i * w;
    const std::int64_t basket_hi = std::min((i + 1) * w, m);
    const std::int64_t base = std::max<std::int64_t>(0, i - 3) * w;
    for (std::int64_t pos = basket_lo; pos < basket_hi; ++pos) {
      tau[static_cast<std::size_t>(pos)] =
          base + pos_in_sorted[static_cast<std::size_t>(pos - lo)] + 1;
    }
  }

  // Stable sort of the whole sequence by tau.
  std::vector<std::int32_t> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](std::int32_t a, std::int32_t b) {
    return tau[static_cast<std::size_t>(a)] < tau[static_cast<std::size_t>(b)];
  });
  std::vector<std::int64_t> next(static_cast<std::size_t>(m));
  for (std::int64_t r = 0; r < m; ++r) {
    next[static_cast<std::size_t>(r)] = items[static_cast<std::size_t>(perm[static_cast<std::size_t>(r)])];
  }

#ifndef NDEBUG
  // Deterministic per-round bounds: |tau - sigma_w| < 4w and
  // |sigma_next - tau| < 4w for every element.
  for (std::int64_t pos = 0; pos < m; ++pos) {
    assert(std::llabs(tau[static_cast<std::size_t>(pos)] - (pos + 1)) < 4 * w);
  }
  for (std::int64_t r = 0; r < m; ++r) {
    const std::int64_t before = perm[static_cast<std::size_t>(r)];
    assert(std::llabs((r + 1) - tau[static_cast<std::size_t>(before)]) < 4 * w);
  }
#endif
  return next;
}

}  // namespace

BasketRoundResult basket_round(const FaultModel& model, const Sequence& seq, std::int64_t w,
                               const RoundObserver& observer) {
  if (w < 1) throw std::invalid_argument("basket_round: w must be >= 1");
  BasketRoundResult result;
  CompStats stats;
  detail::Oracle oracle{&model, &stats};
  const std::vector<std::int64_t>& before = seq.items();
  std::vector<std::int64_t> after = round_pass(oracle, before, w, result.tau);
  if (observer) observer(BasketRoundView{w, before, result.tau, after});
  result.sequence = Sequence(std::move(after));
  result.comparisons = stats.comparisons;
  return result;
}

BasketSortResult basket_sort(const FaultModel& model, const Sequence& seq, std::int64_t w_s,
                             const BasketSortOptions& options) {
  BasketSortResult result;
  result.rho = shrink_rate_with_override(model.p(), model.q(), options.rho_override);
  if (w_s < 1 || seq.empty()) {
    result.sequence = seq;
    return result;
  }
  const std::int64_t m = seq.size();
  std::int64_t w = w_s;
  if (w > m) {
    w = m;
    result.w_clamped = true;
  }

  CompStats stats;
  detail::Oracle oracle{&model, &stats};
  std::vector<std::int64_t> items = seq.items();
  std::vector<std::int64_t> tau;
  while (w >= 1) {
    std::vector<std::int64_t> next = round_pass(oracle, items, w, tau);
    if (options.observer) options.observer(BasketRoundView{w, items, tau, next});
    items = std::move(next);
    ++result.rounds;
    w = static_cast<std::int64_t>(std::floor(result.rho * static_cast<double>(w)));
  }
  result.sequence = Sequence(std::move(items));
  result.comparisons = stats.comparisons;
  return result;
}

TheoreticalBounds theoretical_bounds(double p, double q) {
  const ShrinkRate rate = shrink_rate(p, q);
  TheoreticalBounds bounds;
  bounds.rho = rate.rho;
  const double rho = rate.rho;
  const double margin = rho * (1.0 - p - q) - 10.0 * (p - q) - 8.0 * p * q;
  bounds.score_exponent = margin * margin / 72.0;
  bounds.b_max = 9.0 / (rho * (1.0 - rho)) + 54.0 / (rho * (1.0 - rho) * bounds.score_exponent);
  const double one_minus = 1.0 - rho;
  bounds.b_tot = 1152.0 / (bounds.score_exponent * bounds.score_exponent * one_minus) +
                 311040.0 / (one_minus * one_minus * one_minus * one_minus) + 1.0;
  return bounds;
}

}  // namespace faultsort
