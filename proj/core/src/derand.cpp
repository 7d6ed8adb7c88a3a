#include "faultsort/derand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "faultsort/math_util.hpp"

namespace faultsort {

int xor_bits(std::span<const std::uint8_t> outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("xor_bits: need at least one input");
  int acc = 0;
  for (const std::uint8_t b : outcomes) acc ^= (b & 1);
  return acc;
}

std::int64_t bit_farm_eta(std::int64_t n, double q) {
  if (!(q > 0.0 && q < 0.5)) throw std::domain_error("bit_farm_eta: need 0 < q < 1/2");
  if (n < 2) throw std::invalid_argument("bit_farm_eta: n must be >= 2");
  const double eta = 4.0 * std::log(static_cast<double>(n)) / std::log(1.0 / (1.0 - 2.0 * q));
  return static_cast<std::int64_t>(std::ceil(eta - 1e-12));
}

BitFarm harvest_bits(const FaultModel& model, std::span<const std::int64_t> f,
                     std::span<const std::int64_t> f_prime, std::int64_t eta,
                     const std::function<void(std::int64_t, std::int64_t)>* hook) {
  if (eta < 1) throw std::invalid_argument("harvest_bits: eta must be >= 1");
  if (f.empty() || f_prime.empty()) {
    throw std::invalid_argument("harvest_bits: both F and F' must be non-empty");
  }
  BitFarm farm;
  farm.eta = eta;
  farm.f_size = static_cast<std::int64_t>(f.size());

  CompStats stats;
  detail::Oracle oracle{&model, &stats, hook};

  const std::uint64_t total_pairs =
      static_cast<std::uint64_t>(f.size()) * static_cast<std::uint64_t>(f_prime.size());
  const std::uint64_t blocks = total_pairs / static_cast<std::uint64_t>(eta);
  farm.pool_words.assign(static_cast<std::size_t>((blocks + 63) / 64), 0);

  // Row-major over (F index, F' index); consecutive outcomes fill disjoint
  // eta-blocks, one almost-fair bit per block. The trailing partial block is
  // never compared at all.
  std::uint64_t emitted = 0;
  int acc = 0;
  std::int64_t in_block = 0;
  for (std::size_t i = 0; i < f.size() && emitted < blocks; ++i) {
    for (std::size_t j = 0; j < f_prime.size() && emitted < blocks; ++j) {
      acc ^= (oracle.observe(f[i], f_prime[j]) == OrderOutcome::ReportedSmaller) ? 1 : 0;
      if (++in_block == eta) {
        if (acc) farm.pool_words[static_cast<std::size_t>(emitted >> 6)] |= (1ULL << (emitted & 63u));
        ++emitted;
        acc = 0;
        in_block = 0;
      }
    }
  }
  farm.pool_bits = emitted;
  farm.comparisons = stats.comparisons;
  return farm;
}

namespace {

std::vector<std::int64_t> random_subset_rec(std::vector<std::int64_t> a, std::int64_t h,
                                            BitSource& bits) {
  if (h == 0) return {};  // explicit short-circuit; Alg. 3's base case tests A = {}
  if (a.empty()) return {};

  const UniformDraw pick = sample_uniform_int(bits, a.size());
  const std::int64_t x = a[static_cast<std::size_t>(pick.value)];

  std::vector<std::int64_t> b;
  std::vector<std::int64_t> rest;
  b.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i == static_cast<std::size_t>(pick.value)) continue;
    if (bits.next_bit()) {
      b.push_back(a[i]);
    } else {
      rest.push_back(a[i]);
    }
  }

  if (static_cast<std::int64_t>(b.size()) <= h - 1) {
    std::vector<std::int64_t> chosen = std::move(b);
    chosen.push_back(x);
    const std::int64_t remaining = h - static_cast<std::int64_t>(chosen.size());
    std::vector<std::int64_t> tail = random_subset_rec(std::move(rest), remaining, bits);
    chosen.insert(chosen.end(), tail.begin(), tail.end());
    return chosen;
  }
  return random_subset_rec(std::move(b), h, bits);
}

}  // namespace

SubsetDraw random_subset(std::span<const std::int64_t> a, std::int64_t h, BitSource& bits) {
  if (h < 0 || h > static_cast<std::int64_t>(a.size())) {
    throw std::out_of_range("random_subset: h must lie in [0, |A|]");
  }
  const std::uint64_t before = bits.bits_consumed();
  std::vector<std::int64_t> chosen =
      random_subset_rec(std::vector<std::int64_t>(a.begin(), a.end()), h, bits);

  // Emit in input order.
  std::unordered_set<std::int64_t> mark(chosen.begin(), chosen.end());
  SubsetDraw draw;
  draw.subset.reserve(chosen.size());
  for (const std::int64_t v : a) {
    if (mark.count(v)) draw.subset.push_back(v);
  }
  draw.bits_used = bits.bits_consumed() - before;
  return draw;
}

std::int64_t count_mismatches(const FaultModel& model, std::int64_t x, const Sequence& sprime,
                              std::int64_t r_tilde, std::int64_t c, std::int64_t d,
                              CompStats* stats) {
  if (r_tilde < 1) throw std::invalid_argument("count_mismatches: r_tilde must be >= 1");
  CompStats local;
  detail::Oracle oracle{&model, stats ? stats : &local};
  const std::int64_t m = sprime.size();
  // Window of 1-based positions [r_tilde - cd, r_tilde + cd), clamped.
  const std::int64_t lo = std::max<std::int64_t>(1, r_tilde - c * d);
  const std::int64_t hi = std::min(m + 1, r_tilde + c * d);
  std::int64_t mismatches = 0;
  for (std::int64_t pos = lo; pos < hi; ++pos) {
    const std::int64_t y = sprime[pos - 1];
    const OrderOutcome outcome = oracle.observe(x, y);  // antisymmetric view of y vs x
    if (pos < r_tilde) {
      if (outcome == OrderOutcome::ReportedSmaller) ++mismatches;  // y reported larger
    } else {
      if (outcome == OrderOutcome::ReportedLarger) ++mismatches;  // y reported smaller
    }
  }
  return mismatches;
}

std::int64_t mismatch_scan_c(double p) {
  if (!(p >= 0.0 && p < 0.25)) throw std::domain_error("mismatch_scan_c: need 0 <= p < 1/4");
  std::int64_t c = static_cast<std::int64_t>(
                       std::floor((7.0 - 8.0 * p) / (1.0 - 4.0 * p))) +
                   1;
  if (p > 0.0) {
    c = std::max(c, static_cast<std::int64_t>(std::ceil(51.0 / p - 1e-9)));
  }
  return c;
}

Sequence reinsert_front(const FaultModel& model, const Sequence& sprime,
                        std::span<const std::int64_t> f, std::int64_t c, std::int64_t d,
                        CompStats* stats) {
  if (c < 1 || d < 1) throw std::invalid_argument("reinsert_front: c and d must be >= 1");
  const std::int64_t m = sprime.size();
  std::vector<Insertion> inserts;
  inserts.reserve(f.size());
  for (const std::int64_t x : f) {
    std::int64_t best_r = 1;
    std::int64_t best_count = -1;
    for (std::int64_t r = 1; r <= m + 1; r += d) {
      const std::int64_t count = count_mismatches(model, x, sprime, r, c, d, stats);
      if (best_count < 0 || count < best_count) {  // lowest r wins ties
        best_count = count;
        best_r = r;
      }
    }
    inserts.push_back(Insertion{x, best_r});
  }
  // Simultaneous insertion; ties among F break by F order.
  Sequence f_order{std::vector<std::int64_t>(f.begin(), f.end())};
  return batch_insert(sprime, std::move(inserts), f_order);
}

DerandResult derand_riffle_sort(const FaultModel& model, const Sequence& seq,
                                const DerandConfig& config) {
  const std::int64_t n = seq.size();
  if (n < 1) throw std::invalid_argument("derand_riffle_sort: input must be non-empty");

  DerandResult result;
  RiffleConfig riffle_config;
  riffle_config.mode = config.mode;
  riffle_config.cd_mult = config.cd_mult;
  riffle_config.gamma_eff = config.gamma_eff;
  riffle_config.practical_k = config.practical_k;
  riffle_config.practical_c = config.practical_c;
  riffle_config.rho_override = config.rho_override;

  const auto fallback = [&](const std::string& reason) {
    // Documented escape hatch: randomized RiffleSort seeded from the model
    // seed, so the result is still a function of (model seed, input).
    RiffleConfig rc = riffle_config;
    rc.shuffle = true;
    rc.rng_seed = mix64(model.seed() ^ 0xD6E8FEB86659FD93ULL);
    RiffleResult riffled = riffle_sort(model, seq, rc);
    result.sequence = std::move(riffled.sequence);
    result.comparisons = riffled.comparisons;
    result.used_fallback = true;
    result.fallback_reason = reason;
    result.flags.push_back("fallback_" + reason);
    return result;
  };

  if (model.q() <= 0.0) {
    if (config.strict_q) {
      throw std::invalid_argument("derand_riffle_sort: q must be > 0 (eta undefined at q = 0)");
    }
    return fallback("q_zero");
  }

  result.eta = bit_farm_eta(std::max<std::int64_t>(n, 2), model.q());
  result.f_size = config.farm_size_override.value_or(1000 * result.eta);
  if (config.farm_size_override) result.flags.push_back("farm_size_override");
  if (result.f_size < 1 || result.f_size > n / 2) {
    return fallback("below_threshold");
  }

  // F = first |F| elements of the input order, F' the rest.
  const std::vector<std::int64_t>& items = seq.items();
  std::vector<std::int64_t> f(items.begin(), items.begin() + result.f_size);
  std::vector<std::int64_t> f_prime(items.begin() + result.f_size, items.end());

  BitFarm farm = harvest_bits(model, f, f_prime, result.eta);
  result.bits_harvested = farm.pool_bits;
  CompStats stats;
  stats.comparisons = farm.comparisons;

  PoolBitSource pool(farm.pool_words, farm.pool_bits);
  Sequence sorted_fprime{std::move(f_prime)};
  RiffleResult riffled = riffle_sort_with_bits(model, sorted_fprime, riffle_config, pool);
  stats.comparisons += riffled.comparisons;
  result.bits_consumed = pool.bits_consumed();
  result.bit_budget_exhausted = riffled.bit_budget_exhausted;
  if (riffled.bit_budget_exhausted) result.flags.push_back("bit_budget_exhausted");

  std::int64_t d = config.d_override.value_or(
      3 * std::max<std::int64_t>(ceil_log2(static_cast<std::uint64_t>(
              std::max<std::int64_t>(riffled.sequence.size(), 2))),
          1));
  std::int64_t c = config.c_override.value_or(mismatch_scan_c(model.p()));
  if (config.d_override) result.flags.push_back("d_override");
  if (config.c_override) result.flags.push_back("c_override");

  result.sequence = reinsert_front(model, riffled.sequence, f, c, d, &stats);
  result.comparisons = stats.comparisons;
  return result;
}

}  // namespace faultsort
