// Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
// Tolerances are pinned here and nowhere else.

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <vector>

#include "faultsort/basket_sort.hpp"
#include "faultsort/derand.hpp"
#include "faultsort/experiments.hpp"
#include "faultsort/harness.hpp"
#include "faultsort/math_util.hpp"
#include "faultsort/noisy_search.hpp"
#include "faultsort/riffle_sort.hpp"
#include "faultsort/sampling.hpp"
#include "test_util.hpp"

namespace faultsort {
namespace {

class Criterion {
 public:
  Criterion(std::string name, double budget_seconds)
      : name_(std::move(name)), budget_(budget_seconds) {
    start_ = std::chrono::steady_clock::now();
  }
  // Returns pass AND-ed with the criterion's runtime budget.
  bool report(bool pass, const std::string& detail) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const bool in_budget = secs < budget_;
    std::printf("[ACCEPT] %s %s (%.1fs of %.0fs budget) %s\n", name_.c_str(),
                pass && in_budget ? "PASS" : "FAIL", secs, budget_, detail.c_str());
    std::fflush(stdout);
    return pass && in_budget;
  }

 private:
  std::string name_;
  double budget_;
  std::chrono::steady_clock::time_point start_;
};

// Parallel map over seed indices on the harness worker count.
void parallel_for(int count, const std::function<void(int)>& fn) {
  std::atomic<int> next{0};
  const int workers = std::min(resolve_thread_count(0), count);
  auto work = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  if (workers <= 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

// Criterion 1: riffle_sort, basket_sort and derand_riffle_sort are exact at
// p = 0 for n in {1, 10, 1e3, 1e5}, 10 seeds each. basket_sort runs on seeded
// near-sorted inputs (dislocation <= 64, w_S = 64) at the large sizes and on
// full random permutations with w_S = n at n <= 1e3; w_S >= disl(S) holds by
// construction throughout. derand at p = 0 (q = 0) takes its documented
// deterministic fallback.
TEST(Acceptance, C1_ExactnessAtZeroError) {
  Criterion criterion("criterion-1 exactness-at-p0", 30);
  const std::vector<std::int64_t> sizes = {1, 10, 1000, 100000};
  std::atomic<int> failures{0};

  for (const std::int64_t n : sizes) {
    parallel_for(10, [&](int seed_idx) {
      const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(seed_idx);
      FaultModel model(0.0, 0.0, seed);
      SplitRng rng(seed);

      RiffleConfig rc;
      rc.rng_seed = mix64(seed ^ 0xF00DULL);
      if (riffle_sort(model, Sequence::identity(n), rc).sequence != Sequence::identity(n)) {
        failures.fetch_add(1);
      }

      const std::int64_t w_s = n <= 1000 ? n : 64;
      const Sequence basket_input = n <= 1000 ? fisher_yates(Sequence::identity(n), rng)
                                              : near_sorted_permutation(n, 64, rng);
      if (basket_sort(model, basket_input, w_s).sequence != Sequence::identity(n)) {
        failures.fetch_add(1);
      }

      const DerandResult derand = derand_riffle_sort(model, Sequence::identity(n));
      if (derand.sequence != Sequence::identity(n) || !derand.used_fallback) {
        failures.fetch_add(1);
      }
    });
  }
  const bool pass = criterion.report(failures.load() == 0,
                                     "tolerance: exact; failures=" + std::to_string(failures.load()));
  EXPECT_TRUE(pass);
}

// Criterion 2: persistence and antisymmetry over 1e6 observe calls.
TEST(Acceptance, C2_PersistenceAndAntisymmetry) {
  Criterion criterion("criterion-2 persistence-antisymmetry", 5);
  FaultModel model(0.3, 0.1, 2222, {.prob = PairProbability::sampled_in_range});
  SplitRng rng(17);
  std::int64_t violations = 0;
  const int pairs = 250000;  // 4 observe calls each
  for (int i = 0; i < pairs; ++i) {
    const std::int64_t x = 1 + static_cast<std::int64_t>(sample_uniform_int(rng, 1 << 30));
    std::int64_t y = 1 + static_cast<std::int64_t>(sample_uniform_int(rng, 1 << 30));
    if (x == y) ++y;
    const OrderOutcome a1 = model.observe(x, y);
    const OrderOutcome a2 = model.observe(x, y);
    const OrderOutcome b1 = model.observe(y, x);
    const OrderOutcome b2 = model.observe(y, x);
    if (a1 != a2 || b1 != b2) ++violations;
    if ((a1 == OrderOutcome::ReportedSmaller) == (b1 == OrderOutcome::ReportedSmaller)) {
      ++violations;
    }
  }
  const bool pass = criterion.report(
      violations == 0, "violations=" + std::to_string(violations) + " of 1e6 calls");
  EXPECT_TRUE(pass);
}

// Criterion 3: empirical error frequency within 4 binomial sigma of p.
TEST(Acceptance, C3_ErrorRateCalibration) {
  Criterion criterion("criterion-3 error-calibration", 10);
  bool pass = true;
  std::string detail;
  for (const double p : {0.05, 0.1, 0.25}) {
    FaultModel model(p, p, 3333);
    const int pairs = 1000000;
    std::int64_t errors = 0;
    for (int i = 0; i < pairs; ++i) {
      if (model.erroneous(2 * i + 1, 2 * i + 2)) ++errors;
    }
    const double freq = static_cast<double>(errors) / pairs;
    const double sigma = testutil::binomial_sigma(p, pairs);
    const bool ok = std::abs(freq - p) <= 4 * sigma;
    pass = pass && ok;
    detail += "p=" + std::to_string(p) + " freq=" + std::to_string(freq) + "; ";
  }
  pass = criterion.report(pass, detail + "band: +/-4 sigma");
  EXPECT_TRUE(pass);
}

// Criterion 4: dislocation scaling for riffle_sort at p=q=0.05, practical
// mode, n in {2^12..2^16}, 50 trials each. mean_max/ln n and mean_total/n
// each vary by < 50% across the grid ((max-min)/min < 0.5).
TEST(Acceptance, C4_DislocationScaling) {
  Criterion criterion("criterion-4 dislocation-scaling", 600);
  ExperimentConfig config;
  config.sizes = {1 << 12, 1 << 13, 1 << 14, 1 << 15, 1 << 16};
  config.trials = 50;
  config.p = 0.05;
  config.q = 0.05;
  config.master_seed = 44;
  const TrialRunOutcome outcome = run_trials(config);

  double max_ratio_lo = 1e300, max_ratio_hi = 0;
  double tot_ratio_lo = 1e300, tot_ratio_hi = 0;
  std::string detail;
  for (const SizeAggregate& agg : outcome.aggregates) {
    const double vmax = agg.mean_max / std::log(static_cast<double>(agg.n));
    const double vtot = agg.mean_total / static_cast<double>(agg.n);
    max_ratio_lo = std::min(max_ratio_lo, vmax);
    max_ratio_hi = std::max(max_ratio_hi, vmax);
    tot_ratio_lo = std::min(tot_ratio_lo, vtot);
    tot_ratio_hi = std::max(tot_ratio_hi, vtot);
    detail += "n=" + std::to_string(agg.n) + " max/ln=" + std::to_string(vmax) +
              " tot/n=" + std::to_string(vtot) + "; ";
  }
  const double max_spread = (max_ratio_hi - max_ratio_lo) / max_ratio_lo;
  const double tot_spread = (tot_ratio_hi - tot_ratio_lo) / tot_ratio_lo;
  const bool pass =
      criterion.report(max_spread < 0.5 && tot_spread < 0.5,
                       detail + "spreads=" + std::to_string(max_spread) + "/" +
                           std::to_string(tot_spread) + " (<0.5)");
  EXPECT_TRUE(pass);
}

// Criterion 5: NoisySearch accuracy at p=0.1, m=1e5, disl(S)=0, practical
// params, 1e4 queries: >= 99% within the 2*c*d_eff band and every query at
// most 2*walk_budget*4k comparisons.
TEST(Acceptance, C5_NoisySearchAccuracy) {
  Criterion criterion("criterion-5 noisy-search-accuracy", 120);
  const std::int64_t m = 100000;
  std::vector<std::int64_t> items(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) items[static_cast<std::size_t>(i)] = 2 * (i + 1);
  const Sequence seq{std::move(items)};
  seq.ensure_index();  // shared across query workers
  FaultModel model(0.1, 0.1, 5555);
  const std::int64_t d = ceil_ln(m);
  const WalkParams params = build_params(m, model.p(), d, RunMode::practical);
  const PadPlan pad = pad_sequence(m, params.c, params.d);
  const std::uint64_t comp_cap = 2ull * static_cast<std::uint64_t>(120 * ceil_ln(pad.m_padded)) *
                                 4ull * static_cast<std::uint64_t>(params.k);

  const int queries = 10000;
  std::atomic<int> within{0};
  std::atomic<int> over_budget{0};
  std::atomic<std::int64_t> band_store{0};
  parallel_for(queries, [&](int i) {
    SplitRng rng(9000 + static_cast<std::uint64_t>(i));
    const std::int64_t x = 2 * static_cast<std::int64_t>(sample_uniform_int(rng, m + 1)) + 1;
    const RankEstimate est = noisy_search(model, seq, x, d, params);
    const std::int64_t rank = std::min((x + 1) / 2, m) + (x > 2 * m ? 1 : 0);
    if (std::llabs(est.tau - rank) <= est.band) within.fetch_add(1);
    if (est.comparisons > comp_cap) over_budget.fetch_add(1);
    band_store.store(est.band);
  });
  const double rate = static_cast<double>(within.load()) / queries;
  const bool pass =
      criterion.report(rate >= 0.99 && over_budget.load() == 0,
                       "within-band rate=" + std::to_string(rate) + " band=" +
                           std::to_string(band_store.load()) + " over-budget=" +
                           std::to_string(over_budget.load()));
  EXPECT_TRUE(pass);
}

// Criterion 6: the deterministic per-round BasketSort bounds
// |tau - sigma_w| < 4w, |sigma_next - tau| < 4w, |sigma_next - sigma_w| < 8w
// hold for every element of every round; n=1e4, p=q=0.1, 10 seeds.
TEST(Acceptance, C6_BasketRoundBounds) {
  Criterion criterion("criterion-6 basket-round-bounds", 60);
  std::atomic<std::int64_t> violations{0};
  std::atomic<std::int64_t> elements_checked{0};
  parallel_for(10, [&](int seed_idx) {
    const std::uint64_t seed = 600 + static_cast<std::uint64_t>(seed_idx);
    FaultModel model(0.1, 0.1, seed);
    SplitRng rng(seed);
    // Nine near-sorted runs at n=1e4 plus one full-window run at n=1e3.
    const bool full = seed_idx == 9;
    const std::int64_t n = full ? 1000 : 10000;
    const Sequence input =
        full ? fisher_yates(Sequence::identity(n), rng) : near_sorted_permutation(n, 64, rng);
    const std::int64_t w_s = full ? n : 64;

    BasketSortOptions options;
    options.observer = [&](const BasketRoundView& view) {
      std::unordered_map<std::int64_t, std::int64_t> pos_after;
      pos_after.reserve(view.after.size());
      for (std::size_t r = 0; r < view.after.size(); ++r) {
        pos_after[view.after[r]] = static_cast<std::int64_t>(r);
      }
      for (std::size_t pos = 0; pos < view.before.size(); ++pos) {
        const std::int64_t sigma_w = static_cast<std::int64_t>(pos) + 1;
        const std::int64_t tau = view.tau[pos];
        const std::int64_t sigma_next = pos_after[view.before[pos]] + 1;
        if (std::llabs(tau - sigma_w) >= 4 * view.w) violations.fetch_add(1);
        if (std::llabs(sigma_next - tau) >= 4 * view.w) violations.fetch_add(1);
        if (std::llabs(sigma_next - sigma_w) >= 8 * view.w) violations.fetch_add(1);
        elements_checked.fetch_add(1);
      }
    };
    basket_sort(model, input, w_s, options);
  });
  const bool pass = criterion.report(
      violations.load() == 0,
      "checked=" + std::to_string(elements_checked.load()) +
          " element-rounds, violations=" + std::to_string(violations.load()));
  EXPECT_TRUE(pass);
}

// Criterion 7: RandomSubset size/containment always; chi-square uniformity
// over the 10 2-subsets of a 5-set (1e5 draws, df=9, alpha=1e-3); bits <= 60N
// in >= 99.9% of 1e3 runs at N=1e4.
TEST(Acceptance, C7_RandomSubset) {
  Criterion criterion("criterion-7 random-subset", 60);
  SplitRng rng(7777);
  RngBitSource bits(rng);

  bool structural_ok = true;
  SplitRng meta(1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::int64_t n = 1 + static_cast<std::int64_t>(sample_uniform_int(meta, 50));
    const std::int64_t h =
        static_cast<std::int64_t>(sample_uniform_int(meta, static_cast<std::uint64_t>(n + 1)));
    std::vector<std::int64_t> a(static_cast<std::size_t>(n));
    std::iota(a.begin(), a.end(), 1);
    const SubsetDraw draw = random_subset(a, h, bits);
    structural_ok = structural_ok && static_cast<std::int64_t>(draw.subset.size()) == h &&
                    std::all_of(draw.subset.begin(), draw.subset.end(),
                                [&](std::int64_t v) { return v >= 1 && v <= n; });
  }

  const std::vector<std::int64_t> five = {1, 2, 3, 4, 5};
  std::map<std::vector<std::int64_t>, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[random_subset(five, 2, bits).subset];
  double chi2 = 0;
  const double expected = draws / 10.0;
  for (const auto& [subset, count] : counts) {
    chi2 += (count - expected) * (count - expected) / expected;
  }
  const bool chi_ok = counts.size() == 10 && chi2 < 27.877;  // df=9, alpha=1e-3

  const std::int64_t big_n = 10000;
  std::vector<std::int64_t> big(static_cast<std::size_t>(big_n));
  std::iota(big.begin(), big.end(), 1);
  int over = 0;
  for (int run = 0; run < 1000; ++run) {
    const SubsetDraw draw = random_subset(big, big_n / 2, bits);
    if (draw.bits_used > 60ull * static_cast<std::uint64_t>(big_n)) ++over;
  }
  const bool bits_ok = over <= 1;  // >= 99.9% of 1000 runs

  const bool pass = criterion.report(
      structural_ok && chi_ok && bits_ok,
      "chi2=" + std::to_string(chi2) + " (<27.877), bit-budget misses=" +
          std::to_string(over) + "/1000");
  EXPECT_TRUE(pass);
}

// Criterion 8: XOR bias with inputs at bias delta/2 = 0.2 (Bernoulli 0.7):
// measured |Pr(1) - 1/2| <= (0.4^eta)/2 + 4 sigma over 1e6 blocks each.
TEST(Acceptance, C8_XorBias) {
  Criterion criterion("criterion-8 xor-bias", 10);
  SplitRng rng(8888);
  bool pass = true;
  std::string detail;
  for (const int eta : {1, 2, 4}) {
    const int blocks = 1000000;
    int ones = 0;
    for (int b = 0; b < blocks; ++b) {
      int acc = 0;
      for (int i = 0; i < eta; ++i) acc ^= rng.next_double() < 0.7 ? 1 : 0;
      ones += acc;
    }
    const double freq = static_cast<double>(ones) / blocks;
    const double bound =
        0.5 * std::pow(0.4, eta) + 4.0 * testutil::binomial_sigma(0.5, blocks);
    const bool ok = std::abs(freq - 0.5) <= bound;
    pass = pass && ok;
    detail += "eta=" + std::to_string(eta) + " bias=" + std::to_string(std::abs(freq - 0.5)) +
              " bound=" + std::to_string(bound) + "; ";
  }
  pass = criterion.report(pass, detail);
  EXPECT_TRUE(pass);
}

// Criterion 9: lower-bound floors at p=q=0.1, n=2^14, 50 riffle trials.
TEST(Acceptance, C9_LowerBoundFloors) {
  Criterion criterion("criterion-9 lower-bound-floors", 180);
  const LowerBoundOutcome outcome = experiment_lower_bounds(1 << 14, 0.1, 50, 99);
  const bool pass = criterion.report(
      outcome.pass, "adjacent=" + std::to_string(outcome.adjacent_inversion_freq) + " floor=" +
                        std::to_string(outcome.adjacent_floor) + "; mean-total=" +
                        std::to_string(outcome.mean_total) + " floor=" +
                        std::to_string(outcome.total_floor));
  EXPECT_TRUE(pass);
}

// Criterion 10: comparison-count scaling. riffle_sort count(2n)/count(n) in
// [1.8, 2.6] across n in {2^14..2^16}; basket_sort count scales linearly in
// w_S at fixed n (doubling ratio within [1.5, 2.5]).
TEST(Acceptance, C10_RuntimeScaling) {
  Criterion criterion("criterion-10 runtime-scaling", 300);
  ExperimentConfig config;
  config.sizes = {1 << 14, 1 << 15, 1 << 16};
  config.trials = 5;
  config.p = 0.05;
  config.q = 0.05;
  config.master_seed = 1010;
  const TrialRunOutcome outcome = run_trials(config);
  bool pass = true;
  std::string detail;
  for (std::size_t i = 1; i < outcome.aggregates.size(); ++i) {
    const double ratio =
        outcome.aggregates[i].mean_comparisons / outcome.aggregates[i - 1].mean_comparisons;
    if (!(ratio >= 1.8 && ratio <= 2.6)) {
      pass = false;
      // Known structural sawtooth: the doubling-batch schedule makes the
      // summed intermediate-sequence mass per element swing between ~1.98
      // and ~2.41 depending on how ceil(sqrt(n))*2^k aligns with n, so the
      // per-doubling count ratio oscillates outside this band at the
      // 2^14 -> 2^15 step. Deterministic, not noise.
      detail += "OUT-OF-BAND ";
    }
    detail += "riffle x2 ratio=" + std::to_string(ratio) + "; ";
  }

  const std::int64_t n = 1 << 14;
  std::vector<double> basket_counts;
  for (const std::int64_t w : {64, 128, 256}) {
    double sum = 0;
    for (int t = 0; t < 3; ++t) {
      FaultModel model(0.05, 0.05, 2000 + static_cast<std::uint64_t>(t));
      SplitRng rng(300 + static_cast<std::uint64_t>(t));
      const Sequence input = near_sorted_permutation(n, w, rng);
      sum += static_cast<double>(basket_sort(model, input, w).comparisons);
    }
    basket_counts.push_back(sum / 3.0);
  }
  for (std::size_t i = 1; i < basket_counts.size(); ++i) {
    const double ratio = basket_counts[i] / basket_counts[i - 1];
    pass = pass && ratio >= 1.5 && ratio <= 2.5;  // 2x +/- 25%
    detail += "basket x2 ratio=" + std::to_string(ratio) + "; ";
  }
  pass = criterion.report(pass, detail);
  EXPECT_TRUE(pass);
}

}  // namespace
}  // namespace faultsort
