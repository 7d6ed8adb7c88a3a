#include "faultsort/fault_model.hpp"

#include <cmath>
#include <string>

namespace faultsort {

namespace {

std::uint64_t pack_pair(std::int64_t lo, std::int64_t hi) {
  return (static_cast<std::uint64_t>(lo) << 32) ^ static_cast<std::uint64_t>(hi);
}

}  // namespace

FaultModel::FaultModel(double p, double q, std::uint64_t seed, FaultModelOptions options)
    : p_(p),
      q_(q),
      seed_(seed),
      storage_(options.storage),
      prob_(options.prob),
      key_outcome_(mix64(seed ^ 0xA02D4EB18C5E7F31ULL)),
      key_prob_(mix64(seed ^ 0x5B1E9C03F47A6D95ULL)) {
  if (!(q >= 0.0 && q <= p && p < 0.5)) {
    throw std::invalid_argument("FaultModel: need 0 <= q <= p < 1/2");
  }

  fast_.key = key_outcome_;
  fast_.threshold = static_cast<std::uint64_t>(
      std::llroundl(static_cast<long double>(p_) * 18446744073709551616.0L));

  for (const auto& [x, y, pxy] : options.per_pair) {
    if (x == y) throw std::invalid_argument("FaultModel: per-pair override with x == y");
    if (pxy < q_ || pxy > p_) {
      throw std::invalid_argument("FaultModel: per-pair probability outside [q, p]");
    }
    const std::int64_t lo = x < y ? x : y;
    const std::int64_t hi = x < y ? y : x;
    overrides_[pack_pair(lo, hi)] = pxy;
  }
  has_overrides_ = !overrides_.empty();
  fast_valid_ = storage_ == StorageMode::prf && prob_ == PairProbability::uniform_p &&
                !has_overrides_;

  if (storage_ == StorageMode::matrix) {
    if (options.n < 1) throw std::invalid_argument("FaultModel: matrix mode requires n >= 1");
    if (options.n > options.matrix_cap) {
      throw std::invalid_argument("FaultModel: matrix mode capped at n <= " +
                                  std::to_string(options.matrix_cap));
    }
    matrix_n_ = options.n;
    const std::uint64_t pairs =
        static_cast<std::uint64_t>(matrix_n_) * static_cast<std::uint64_t>(matrix_n_ - 1) / 2;
    matrix_.assign((pairs + 63) / 64, 0);
    // Same per-pair probabilities as prf mode; the outcome bits come from an
    // independent draw, so the two storage modes agree in distribution but
    // not outcome-for-outcome.
    SplitRng rng(seed ^ 0xC3A5C85C97CB3127ULL);
    for (std::int64_t lo = 1; lo < matrix_n_; ++lo) {
      for (std::int64_t hi = lo + 1; hi <= matrix_n_; ++hi) {
        const double pxy = has_overrides_ ? pair_probability_slow(lo, hi)
                                          : prf_pair_probability(lo, hi);
        if (rng.next_double() < pxy) {
          const std::size_t idx = matrix_index(lo, hi);
          matrix_[idx >> 6] |= (1ULL << (idx & 63u));
        }
      }
    }
  }
}

std::size_t FaultModel::matrix_index(std::int64_t lo, std::int64_t hi) const {
  // Pairs with 1 <= lo < hi <= n, row-major by lo.
  const std::uint64_t row_offset = static_cast<std::uint64_t>(lo - 1) *
                                   (2 * static_cast<std::uint64_t>(matrix_n_) - lo) / 2;
  return static_cast<std::size_t>(row_offset + static_cast<std::uint64_t>(hi - lo - 1));
}

bool FaultModel::matrix_bit(std::int64_t lo, std::int64_t hi) const {
  if (lo < 1 || hi > matrix_n_) {
    throw std::out_of_range("FaultModel: element outside the matrix range");
  }
  const std::size_t idx = matrix_index(lo, hi);
  return (matrix_[idx >> 6] >> (idx & 63u)) & 1u;
}

double FaultModel::pair_probability_slow(std::int64_t lo, std::int64_t hi) const {
  auto it = overrides_.find(pack_pair(lo, hi));
  if (it != overrides_.end()) return it->second;
  return prf_pair_probability(lo, hi);
}

double FaultModel::pair_probability(std::int64_t x, std::int64_t y) const {
  if (x == y) throw std::invalid_argument("pair_probability: elements must be distinct");
  const std::int64_t lo = x < y ? x : y;
  const std::int64_t hi = x < y ? y : x;
  if (has_overrides_) return pair_probability_slow(lo, hi);
  return prf_pair_probability(lo, hi);
}

}  // namespace faultsort
