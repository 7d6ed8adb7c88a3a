#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "faultsort/basket_sort.hpp"
#include "faultsort/fault_model.hpp"
#include "faultsort/noisy_search.hpp"
#include "faultsort/rng.hpp"
#include "faultsort/sequence.hpp"

namespace faultsort {

// Batch sizes for Alg. 1: |T_0| = ceil(sqrt(n)), |T_i| = 2^(i-1)*ceil(sqrt(n))
// for i < k, T_k the remainder; k is the smallest integer whose cumulative
// size reaches n.
struct BatchPlan {
  std::int64_t k = 0;
  std::vector<std::int64_t> sizes;  // k+1 entries
};
BatchPlan batch_plan(std::int64_t n);

// Random partition of sprime into the plan's batches, each batch kept in
// sprime order. The rng route assigns via a shuffled index vector; the bits
// route draws T_k, T_{k-1}, ..., T_0 with RandomSubset (the derandomized
// strategy) and throws BitBudgetExhausted when the source drains.
std::vector<std::vector<std::int64_t>> partition_batches(const Sequence& sprime, SplitRng& rng);
std::vector<std::vector<std::int64_t>> partition_batches(const Sequence& sprime, BitSource& bits);

struct Insertion {
  std::int64_t value = 0;
  std::int64_t rank = 1;  // 1-based target rank in [1, |S|+1]
};

// Simultaneous insertion: every x lands at its target rank in one shot, ahead
// of the existing occupant of that slot; elements with equal ranks are placed
// in their sprime order. Out-of-range ranks are clamped (counted via
// clamped_count).
Sequence batch_insert(const Sequence& seq, std::vector<Insertion> inserts,
                      const Sequence& sprime, std::int64_t* clamped_count = nullptr);

struct RiffleConfig {
  RunMode mode = RunMode::practical;
  bool shuffle = true;          // --assume-independent-order turns this off
  std::uint64_t rng_seed = 1;   // shuffle + partition stream (distinct from the model seed)
  std::int64_t cd_mult = 3;     // practical d_search = cd_mult * ceil(ln n)
  double gamma_eff = 8.0;       // practical basket window = gamma_eff * d_search
  int practical_k = 5;
  std::int64_t practical_c = 8;
  std::optional<double> rho_override;
  std::int64_t small_n_cutoff = 64;  // below this, one BasketSort(S, n) call
};

struct RiffleResult {
  Sequence sequence;
  std::uint64_t comparisons = 0;
  BatchPlan plan;
  std::int64_t d_search = 0;
  std::int64_t basket_window = 0;
  std::int64_t clamped_ranks = 0;
  bool bit_budget_exhausted = false;  // derandomized route only
  std::vector<std::string> flags;
};

// Alg. 1: optional shuffle, geometric batch partition, per-batch NoisySearch
// ranks, simultaneous insertion, BasketSort repair after every batch.
RiffleResult riffle_sort(const FaultModel& model, const Sequence& seq,
                         const RiffleConfig& config = {});

// Derandomized variant: shuffle is skipped and the partition consumes the
// given bit source. Exhausting the source aborts to an arbitrary permutation
// (the input order), flagged in the result.
RiffleResult riffle_sort_with_bits(const FaultModel& model, const Sequence& seq,
                                   const RiffleConfig& config, BitSource& bits);

}  // namespace faultsort
