#include "faultsort/riffle_sort.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "faultsort/derand.hpp"
#include "faultsort/math_util.hpp"
#include "faultsort/sampling.hpp"

namespace faultsort {

BatchPlan batch_plan(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("batch_plan: n must be >= 1");
  BatchPlan plan;
  const std::int64_t root = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  // k = smallest integer with root * 2^k >= n.
  std::int64_t k = 0;
  while (root << k < n) ++k;
  plan.k = k;
  plan.sizes.assign(static_cast<std::size_t>(k + 1), 0);
  plan.sizes[0] = std::min(root, n);
  std::int64_t used = plan.sizes[0];
  for (std::int64_t i = 1; i < k; ++i) {
    plan.sizes[static_cast<std::size_t>(i)] = (std::int64_t{1} << (i - 1)) * root;
    used += plan.sizes[static_cast<std::size_t>(i)];
  }
  if (k >= 1) plan.sizes[static_cast<std::size_t>(k)] = n - used;
  return plan;
}

namespace {

std::vector<std::vector<std::int64_t>> batches_from_assignment(
    const Sequence& sprime, const BatchPlan& plan,
    const std::vector<std::int64_t>& batch_of_position) {
  std::vector<std::vector<std::int64_t>> batches(plan.sizes.size());
  for (std::size_t i = 0; i < plan.sizes.size(); ++i) {
    batches[i].reserve(static_cast<std::size_t>(plan.sizes[i]));
  }
  // Scanning positions in order keeps every batch in sprime order.
  for (std::int64_t pos = 0; pos < sprime.size(); ++pos) {
    batches[static_cast<std::size_t>(batch_of_position[static_cast<std::size_t>(pos)])].push_back(
        sprime[pos]);
  }
  return batches;
}

}  // namespace

std::vector<std::vector<std::int64_t>> partition_batches(const Sequence& sprime, SplitRng& rng) {
  const std::int64_t n = sprime.size();
  const BatchPlan plan = batch_plan(n);
  std::vector<std::int64_t> positions(static_cast<std::size_t>(n));
  std::iota(positions.begin(), positions.end(), std::int64_t{0});
  fisher_yates_inplace(positions, rng);

  std::vector<std::int64_t> batch_of_position(static_cast<std::size_t>(n));
  std::int64_t cursor = 0;
  for (std::size_t i = 0; i < plan.sizes.size(); ++i) {
    for (std::int64_t j = 0; j < plan.sizes[i]; ++j) {
      batch_of_position[static_cast<std::size_t>(positions[static_cast<std::size_t>(cursor++)])] =
          static_cast<std::int64_t>(i);
    }
  }
  return batches_from_assignment(sprime, plan, batch_of_position);
}

std::vector<std::vector<std::int64_t>> partition_batches(const Sequence& sprime, BitSource& bits) {
  const std::int64_t n = sprime.size();
  const BatchPlan plan = batch_plan(n);
  std::vector<std::int64_t> batch_of_position(static_cast<std::size_t>(n), 0);
  std::vector<std::int64_t> unassigned(static_cast<std::size_t>(n));
  std::iota(unassigned.begin(), unassigned.end(), std::int64_t{0});

  // The derandomized strategy draws T_k, T_{k-1}, ..., T_1 from the remaining
  // positions; T_0 is whatever is left.
  for (std::int64_t i = plan.k; i >= 1; --i) {
    const SubsetDraw draw =
        random_subset(unassigned, plan.sizes[static_cast<std::size_t>(i)], bits);
    for (const std::int64_t pos : draw.subset) {
      batch_of_position[static_cast<std::size_t>(pos)] = i;
    }
    std::vector<std::int64_t> rest;
    rest.reserve(unassigned.size() - draw.subset.size());
    std::size_t cursor = 0;
    for (const std::int64_t pos : unassigned) {
      if (cursor < draw.subset.size() && draw.subset[cursor] == pos) {
        ++cursor;
        continue;
      }
      rest.push_back(pos);
    }
    unassigned = std::move(rest);
  }
  return batches_from_assignment(sprime, plan, batch_of_position);
}

Sequence batch_insert(const Sequence& seq, std::vector<Insertion> inserts,
                      const Sequence& sprime, std::int64_t* clamped_count) {
  const std::int64_t m = seq.size();
  std::int64_t clamped = 0;
  for (Insertion& ins : inserts) {
    if (ins.rank < 1) {
      ins.rank = 1;
      ++clamped;
    } else if (ins.rank > m + 1) {
      ins.rank = m + 1;
      ++clamped;
    }
  }
  if (clamped_count) *clamped_count += clamped;

  // Equal ranks break by sprime order.
  sprime.ensure_index();
  std::stable_sort(inserts.begin(), inserts.end(), [&](const Insertion& a, const Insertion& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return sprime.position_of(a.value) < sprime.position_of(b.value);
  });

  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(m) + inserts.size());
  std::size_t cursor = 0;
  for (std::int64_t pos = 0; pos <= m; ++pos) {
    // Inserted elements targeting rank pos+1 land before the existing
    // occupant of that slot.
    while (cursor < inserts.size() && inserts[cursor].rank == pos + 1) {
      out.push_back(inserts[cursor].value);
      ++cursor;
    }
    if (pos < m) out.push_back(seq[pos]);
  }
  return Sequence(std::move(out));
}

namespace {

struct SearchScale {
  std::int64_t d_search = 0;
  std::int64_t basket_window = 0;
  WalkParams params;
};

SearchScale riffle_scale(const FaultModel& model, std::int64_t n, const RiffleConfig& config) {
  SearchScale scale;
  if (config.mode == RunMode::theoretical) {
    const TheoreticalBounds bounds = theoretical_bounds(model.p(), model.q());
    const double ln_n = std::log(static_cast<double>(std::max<std::int64_t>(n, 2)));
    scale.d_search = static_cast<std::int64_t>(std::ceil(bounds.b_max * ln_n));
    scale.params = build_params(n, model.p(), scale.d_search, RunMode::theoretical);
    const double alpha = 1000.0 * static_cast<double>(scale.params.k);
    const double gamma = 226.0 * alpha;
    const double window = gamma * static_cast<double>(scale.d_search);
    scale.basket_window =
        window > static_cast<double>(n) ? n : static_cast<std::int64_t>(std::ceil(window));
  } else {
    scale.d_search = config.cd_mult * std::max<std::int64_t>(ceil_ln(n), 1);
    scale.params = build_params(n, model.p(), scale.d_search, RunMode::practical,
                                config.practical_k, config.practical_c);
    scale.basket_window = static_cast<std::int64_t>(
        std::ceil(config.gamma_eff * static_cast<double>(scale.d_search)));
  }
  return scale;
}

RiffleResult riffle_run(const FaultModel& model, const Sequence& seq, const RiffleConfig& config,
                        BitSource* bits) {
  const std::int64_t n = seq.size();
  if (n < 1) throw std::invalid_argument("riffle_sort: input must be non-empty");

  RiffleResult result;
  BasketSortOptions basket_options;
  basket_options.rho_override = config.rho_override;

  if (n < config.small_n_cutoff) {
    BasketSortResult sorted = basket_sort(model, seq, n, basket_options);
    result.sequence = std::move(sorted.sequence);
    result.comparisons = sorted.comparisons;
    result.plan = batch_plan(n);
    result.flags.push_back("small_n_basket");
    return result;
  }

  SplitRng rng(config.rng_seed);
  const Sequence sprime =
      (config.shuffle && bits == nullptr) ? fisher_yates(seq, rng) : seq;
  sprime.ensure_index();

  std::vector<std::vector<std::int64_t>> batches;
  if (bits != nullptr) {
    try {
      batches = partition_batches(sprime, *bits);
    } catch (const BitBudgetExhausted&) {
      // Out of random bits: stop and return an arbitrary permutation.
      result.sequence = sprime;
      result.bit_budget_exhausted = true;
      result.flags.push_back("bit_budget_exhausted");
      result.plan = batch_plan(n);
      return result;
    }
  } else {
    batches = partition_batches(sprime, rng);
  }
  result.plan = batch_plan(n);

  const SearchScale scale = riffle_scale(model, n, config);
  result.d_search = scale.d_search;
  result.basket_window = scale.basket_window;

  CompStats stats;

  // S_0 = BasketSort(T_0 subsequence, |T_0|).
  Sequence current{std::vector<std::int64_t>(batches[0])};
  {
    BasketSortResult sorted = basket_sort(model, current, current.size(), basket_options);
    current = std::move(sorted.sequence);
    stats.comparisons += sorted.comparisons;
  }

  for (std::size_t i = 1; i < batches.size(); ++i) {
    const std::vector<std::int64_t>& batch = batches[i];
    std::vector<Insertion> inserts;
    inserts.reserve(batch.size());
    current.ensure_index();
    for (const std::int64_t x : batch) {
      const RankEstimate estimate = noisy_search(model, current, x, scale.d_search, scale.params);
      stats.comparisons += estimate.comparisons;
      inserts.push_back(Insertion{x, estimate.tau});
    }
    current = batch_insert(current, std::move(inserts), sprime, &result.clamped_ranks);

    BasketSortResult sorted =
        basket_sort(model, current, scale.basket_window, basket_options);
    current = std::move(sorted.sequence);
    stats.comparisons += sorted.comparisons;
  }

  if (result.clamped_ranks > 0) result.flags.push_back("clamped_ranks");
  result.sequence = std::move(current);
  result.comparisons = stats.comparisons;
  return result;
}

}  // namespace

RiffleResult riffle_sort(const FaultModel& model, const Sequence& seq,
                         const RiffleConfig& config) {
  return riffle_run(model, seq, config, nullptr);
}

RiffleResult riffle_sort_with_bits(const FaultModel& model, const Sequence& seq,
                                   const RiffleConfig& config, BitSource& bits) {
  return riffle_run(model, seq, config, &bits);
}

}  // namespace faultsort
