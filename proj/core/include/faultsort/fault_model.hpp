#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "faultsort/rng.hpp"

namespace faultsort {

// Outcome of a noisy comparison, stated for the first argument:
// observe(x, y) == ReportedSmaller means x was reported smaller than y.
enum class OrderOutcome : std::uint8_t { ReportedSmaller, ReportedLarger };

enum class StorageMode { prf, matrix };
enum class PairProbability { uniform_p, sampled_in_range };

namespace detail {

// Keyed-PRF outcome evaluation for the uniform-p prf configuration. Shared by
// FaultModel::observe and the hot scoring loops so both produce identical
// outcome bits.
struct PrfPath {
  std::uint64_t key = 0;
  std::uint64_t threshold = 0;  // round(p * 2^64)

  bool erroneous(std::int64_t lo, std::int64_t hi) const {
    return mix64(static_cast<std::uint64_t>(lo) ^
                 mix64(static_cast<std::uint64_t>(hi) ^ key)) < threshold;
  }
  // x reported larger than y.
  bool reports_larger(std::int64_t x, std::int64_t y) const {
    const bool truly_smaller = x < y;
    const std::int64_t lo = truly_smaller ? x : y;
    const std::int64_t hi = truly_smaller ? y : x;
    return truly_smaller == erroneous(lo, hi);
  }
};

}  // namespace detail

struct FaultModelOptions {
  StorageMode storage = StorageMode::prf;
  PairProbability prob = PairProbability::uniform_p;
  // Required for matrix mode: elements are 1..n.
  std::int64_t n = 0;
  std::int64_t matrix_cap = 4096;
  // Explicit per-pair probabilities {x, y, p_xy}; each must lie in [q, p].
  std::vector<std::tuple<std::int64_t, std::int64_t, double>> per_pair;
};

// Persistent noisy comparison oracle. Each unordered pair {x, y} has a fixed
// error probability p_xy in [q, p]; whether the pair's outcome is flipped is
// decided once (a keyed PRF over the pair in prf mode, a precomputed table in
// matrix mode), so repeated comparisons always agree and observe(x, y) and
// observe(y, x) are always mutually consistent. A constructed model is
// immutable and safe to share across threads.
class FaultModel {
 public:
  FaultModel(double p, double q, std::uint64_t seed, FaultModelOptions options = {});

  OrderOutcome observe(std::int64_t x, std::int64_t y) const {
    if (x == y) throw std::invalid_argument("observe: elements must be distinct");
    const bool truly_smaller = x < y;
    return (truly_smaller != erroneous(x, y)) ? OrderOutcome::ReportedSmaller
                                              : OrderOutcome::ReportedLarger;
  }

  // True iff the persistent outcome for {x, y} is the wrong one.
  bool erroneous(std::int64_t x, std::int64_t y) const {
    const std::int64_t lo = x < y ? x : y;
    const std::int64_t hi = x < y ? y : x;
    if (fast_valid_) return fast_.erroneous(lo, hi);
    if (storage_ == StorageMode::matrix) return matrix_bit(lo, hi);
    const double pxy = has_overrides_ ? pair_probability_slow(lo, hi) : prf_pair_probability(lo, hi);
    if (pxy == 0.0) return false;
    const double u = static_cast<double>(prf(lo, hi) >> 11) * 0x1.0p-53;
    return u < pxy;
  }

  // Set when the model is uniform-p prf without per-pair overrides; hot loops
  // may evaluate it inline with results identical to observe().
  const detail::PrfPath* prf_fast_path() const { return fast_valid_ ? &fast_ : nullptr; }

  // The error probability assigned to the unordered pair {x, y}.
  double pair_probability(std::int64_t x, std::int64_t y) const;

  double p() const { return p_; }
  double q() const { return q_; }
  std::uint64_t seed() const { return seed_; }
  StorageMode storage() const { return storage_; }

 private:
  std::uint64_t prf(std::int64_t lo, std::int64_t hi) const {
    return mix64(static_cast<std::uint64_t>(lo) ^
                 mix64(static_cast<std::uint64_t>(hi) ^ key_outcome_));
  }

  double prf_pair_probability(std::int64_t lo, std::int64_t hi) const {
    if (prob_ == PairProbability::uniform_p) return p_;
    const std::uint64_t v =
        mix64(static_cast<std::uint64_t>(lo) ^ mix64(static_cast<std::uint64_t>(hi) ^ key_prob_));
    return q_ + (p_ - q_) * (static_cast<double>(v >> 11) * 0x1.0p-53);
  }

  double pair_probability_slow(std::int64_t lo, std::int64_t hi) const;
  bool matrix_bit(std::int64_t lo, std::int64_t hi) const;
  std::size_t matrix_index(std::int64_t lo, std::int64_t hi) const;

  double p_;
  double q_;
  std::uint64_t seed_;
  StorageMode storage_;
  PairProbability prob_;
  std::uint64_t key_outcome_;
  std::uint64_t key_prob_;
  detail::PrfPath fast_;
  bool fast_valid_ = false;
  bool has_overrides_ = false;
  std::unordered_map<std::uint64_t, double> overrides_;  // packed pair -> p_xy
  std::int64_t matrix_n_ = 0;
  std::vector<std::uint64_t> matrix_;  // one error bit per pair, lo < hi
};

// Comparison counting carried through every algorithm in this library.
struct CompStats {
  std::uint64_t comparisons = 0;
};

namespace detail {

// Thin counting view over a model; optional hook observes every compared pair.
struct Oracle {
  const FaultModel* model;
  CompStats* stats;
  const std::function<void(std::int64_t, std::int64_t)>* hook = nullptr;

  OrderOutcome observe(std::int64_t x, std::int64_t y) {
    ++stats->comparisons;
    if (hook && *hook) (*hook)(x, y);
    return model->observe(x, y);
  }
  bool reports_larger(std::int64_t x, std::int64_t y) {
    return observe(x, y) == OrderOutcome::ReportedLarger;
  }
};

}  // namespace detail

}  // namespace faultsort
