#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "faultsort/fault_model.hpp"
#include "faultsort/sequence.hpp"

namespace faultsort {

struct ShrinkRate {
  double rho = 0.5;
  double admissible_low = 0.0;  // open lower end of the admissible band
};

// rho = 1/2 + (4pq + 5(p-q))/(1-p-q); any value in
// ((8pq + 10(p-q))/(1-p-q), 1) is admissible, which requires
// p < (9q+1)/(8q+11). Throws model_out_of_range on violation.
ShrinkRate shrink_rate(double p, double q);

// Validated practical override: must stay in the admissible band and only
// narrow rho toward 1/2 (never exceed the theoretical value).
double shrink_rate_with_override(double p, double q, std::optional<double> override_rho);

// score(x) = |{y in window \ {x} : y reported smaller than x}|, each pair
// compared exactly once: |B|(|B|-1)/2 comparisons.
std::vector<std::int64_t> score_basket(const FaultModel& model,
                                       std::span<const std::int64_t> window,
                                       CompStats* stats = nullptr);

// Snapshot of one window-w round handed to observers: items at round start,
// tau indexed by start position, and items after the stable tau sort.
struct BasketRoundView {
  std::int64_t w = 0;
  const std::vector<std::int64_t>& before;
  const std::vector<std::int64_t>& tau;
  const std::vector<std::int64_t>& after;
};
using RoundObserver = std::function<void(const BasketRoundView&)>;

struct BasketRoundResult {
  Sequence sequence;
  std::vector<std::int64_t> tau;  // indexed by position in the input sequence
  std::uint64_t comparisons = 0;
};

// One round: partition into ceil(m/w) consecutive baskets, score each element
// within its +/-3-basket union B, stable-sort B by score into A, assign
// tau(x) = max(0, i-4)*w + pos(x, A) to basket i's members only (1-based
// formula), then stable-sort the whole sequence by tau. The round's output
// does not depend on rho; rho only drives the caller's window shrink.
BasketRoundResult basket_round(const FaultModel& model, const Sequence& seq, std::int64_t w,
                               const RoundObserver& observer = {});

struct BasketSortOptions {
  std::optional<double> rho_override;
  RoundObserver observer;
};

struct BasketSortResult {
  Sequence sequence;
  std::uint64_t comparisons = 0;
  std::int64_t rounds = 0;
  double rho = 0.5;
  bool w_clamped = false;  // w_S was clamped down to m
};

// Alg. 2: iterate basket_round with w <- floor(rho*w) until w < 1.
// w_S < 1 returns the input unchanged; w_S is clamped to at most m.
BasketSortResult basket_sort(const FaultModel& model, const Sequence& seq, std::int64_t w_s,
                             const BasketSortOptions& options = {});

// Display-only theoretical constants (Lemmas on max/total dislocation); the
// expressions are enormous for desk-scale parameters and are never asserted.
struct TheoreticalBounds {
  double rho = 0.0;
  double score_exponent = 0.0;  // the Hoeffding exponent constant
  double b_max = 0.0;           // max dislocation <= b_max * ln m (leading term)
  double b_tot = 0.0;           // total dislocation <= b_tot * m
};
TheoreticalBounds theoretical_bounds(double p, double q);

}  // namespace faultsort
