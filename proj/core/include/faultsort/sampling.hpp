#pragma once

#include <cstdint>

#include "faultsort/fault_model.hpp"
#include "faultsort/rng.hpp"
#include "faultsort/sequence.hpp"

namespace faultsort {

// Uniformly random permutation of the input (Fisher-Yates).
Sequence fisher_yates(const Sequence& seq, SplitRng& rng);
void fisher_yates_inplace(std::vector<std::int64_t>& items, SplitRng& rng);

// Stress-input generator: plays the full noisy round-robin tournament and
// orders elements 1..n by descending observed win count (ties by ascending
// value), so the input order correlates with the comparison errors.
// O(n^2) comparisons; refuses n above the cap.
Sequence adversarial_order(const FaultModel& model, std::int64_t n,
                           std::int64_t cap = 16384, CompStats* stats = nullptr);

}  // namespace faultsort
