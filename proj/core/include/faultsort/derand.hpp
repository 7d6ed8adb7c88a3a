#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "faultsort/fault_model.hpp"
#include "faultsort/riffle_sort.hpp"
#include "faultsort/rng.hpp"
#include "faultsort/sequence.hpp"

namespace faultsort {

// XOR fold of a non-empty bit list. Bias contracts per Lemma on XOR-ed
// Bernoullis: inputs with bias <= delta/2 yield output bias <= delta^eta/2.
int xor_bits(std::span<const std::uint8_t> outcomes);

// eta = ceil(4 ln n / ln(1/(1-2q))); requires q in (0, 1/2).
std::int64_t bit_farm_eta(std::int64_t n, double q);

struct BitFarm {
  std::int64_t eta = 0;
  std::int64_t f_size = 0;
  std::vector<std::uint64_t> pool_words;
  std::uint64_t pool_bits = 0;
  std::uint64_t comparisons = 0;
};

// Compares every x in F with every y in F' exactly once (row-major by F index
// then F' index), chunks the outcome stream into disjoint eta-blocks and XORs
// each block into one near-fair bit. Only F x F' pairs are touched, so the
// comparator state over F' pairs stays unconsumed.
BitFarm harvest_bits(const FaultModel& model, std::span<const std::int64_t> f,
                     std::span<const std::int64_t> f_prime, std::int64_t eta,
                     const std::function<void(std::int64_t, std::int64_t)>* hook = nullptr);

struct SubsetDraw {
  std::vector<std::int64_t> subset;  // kept in input order
  std::uint64_t bits_used = 0;
};

// Alg. 3 RandomSubset: uniform over all h-subsets of a. Pick x uniformly via
// bit rejection sampling, keep each remaining element with one coin flip into
// B, then recurse on the short side. h = 0 short-circuits to the empty set.
// Throws on h outside [0, |a|]; propagates BitBudgetExhausted from the source.
SubsetDraw random_subset(std::span<const std::int64_t> a, std::int64_t h, BitSource& bits);

// Mismatch count m_x(r_tilde) over the clamped window
// {y : r_tilde - cd <= pos_1b(y) < r_tilde + cd}: counts y before the split
// reported larger than x plus y at/after the split reported smaller.
std::int64_t count_mismatches(const FaultModel& model, std::int64_t x, const Sequence& sprime,
                              std::int64_t r_tilde, std::int64_t c, std::int64_t d,
                              CompStats* stats = nullptr);

// Smallest integer c with c >= 51/p and c > (7-8p)/(1-4p); requires p < 1/4
// (p = 0 needs only the second constraint).
std::int64_t mismatch_scan_c(double p);

// For each x in F evaluate m_x on the grid {1, 1+d, 1+2d, ...} capped at
// |S'|+1, take the lowest argmin as its rank, and insert all of F
// simultaneously (ties by F order).
Sequence reinsert_front(const FaultModel& model, const Sequence& sprime,
                        std::span<const std::int64_t> f, std::int64_t c, std::int64_t d,
                        CompStats* stats = nullptr);

struct DerandConfig {
  RunMode mode = RunMode::practical;
  std::int64_t cd_mult = 3;
  double gamma_eff = 8.0;
  int practical_k = 5;
  std::int64_t practical_c = 8;
  std::optional<double> rho_override;
  // q == 0 throws instead of falling back when set.
  bool strict_q = false;
  // Experimentation overrides; defaults are |F| = 1000*eta,
  // c from mismatch_scan_c, d = 3*ceil(log2 n')). Overrides are flagged.
  std::optional<std::int64_t> farm_size_override;
  std::optional<std::int64_t> c_override;
  std::optional<std::int64_t> d_override;
};

struct DerandResult {
  Sequence sequence;
  std::uint64_t comparisons = 0;
  bool used_fallback = false;
  std::string fallback_reason;  // "q_zero" | "below_threshold" | ""
  std::int64_t eta = 0;
  std::int64_t f_size = 0;
  std::uint64_t bits_harvested = 0;
  std::uint64_t bits_consumed = 0;
  bool bit_budget_exhausted = false;
  std::vector<std::string> flags;
};

// Deterministic pipeline: harvest near-fair bits from F x F' comparisons, run
// RiffleSort on F' with the pool as its only randomness (shuffle skipped,
// partition via RandomSubset), then reinsert F by mismatch scanning. Fully
// determined by (model seed, input). When the farm is infeasible
// (1000*eta > n/2) or q == 0, falls back to randomized riffle_sort seeded
// from the model seed, flagged with the reason.
DerandResult derand_riffle_sort(const FaultModel& model, const Sequence& seq,
                                const DerandConfig& config = {});

}  // namespace faultsort
