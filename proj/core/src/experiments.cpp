#include "faultsort/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

#include "faultsort/sampling.hpp"

namespace faultsort {

DislocationReport brute_force_oracle(const Sequence& seq, bool per_element) {
  const auto& items = seq.items();
  const std::int64_t m = seq.size();
  DislocationReport report;
  if (per_element) report.per_element.resize(items.size());
  for (std::int64_t pos = 0; pos < m; ++pos) {
    std::int64_t smaller = 0;
    for (std::int64_t other = 0; other < m; ++other) {
      if (items[static_cast<std::size_t>(other)] < items[static_cast<std::size_t>(pos)]) {
        ++smaller;
      }
    }
    const std::int64_t d = std::llabs(pos - smaller);  // rank0 = #smaller
    report.total_dislocation += d;
    report.max_dislocation = std::max(report.max_dislocation, d);
    if (per_element) report.per_element[static_cast<std::size_t>(pos)] = d;
  }
  return report;
}

LowerBoundOutcome experiment_lower_bounds(std::int64_t n, double p, int trials,
                                          std::uint64_t seed, int threads) {
  if (!(p > 0.0 && p < 0.5)) {
    throw std::invalid_argument("experiment_lower_bounds: need 0 < p = q < 1/2");
  }
  if (trials < 2) throw std::invalid_argument("experiment_lower_bounds: need trials >= 2");
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("experiment_lower_bounds: n must be even and >= 2");
  }

  LowerBoundOutcome outcome;
  outcome.rows.resize(static_cast<std::size_t>(trials));
  std::vector<std::int64_t> inversions(static_cast<std::size_t>(trials), 0);

  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= trials) return;
      const std::uint64_t trial_seed = seed ^ static_cast<std::uint64_t>(t);
      FaultModel model(p, p, trial_seed);
      RiffleConfig rc;
      rc.rng_seed = mix64(trial_seed ^ 0x1EAFULL);
      const RiffleResult r = riffle_sort(model, Sequence::identity(n), rc);

      const DislocationReport d = dislocation_report(r.sequence);
      TrialReport& row = outcome.rows[static_cast<std::size_t>(t)];
      row.trial_id = static_cast<std::uint64_t>(t);
      row.seed = trial_seed;
      row.n = n;
      row.p = p;
      row.q = p;
      row.algorithm = "riffle_sort";
      row.max_dislocation = d.max_dislocation;
      row.total_dislocation = d.total_dislocation;
      row.comparisons = r.comparisons;

      r.sequence.ensure_index();
      std::int64_t inv = 0;
      for (std::int64_t k = 0; 2 * k + 2 <= n; ++k) {
        if (r.sequence.position_of(2 * k + 2) < r.sequence.position_of(2 * k + 1)) ++inv;
      }
      inversions[static_cast<std::size_t>(t)] = inv;
    }
  };
  const int workers = std::min(resolve_thread_count(threads), trials);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  const double pair_count = static_cast<double>(trials) * static_cast<double>(n / 2);
  double inv_total = 0;
  double total_sum = 0;
  for (int t = 0; t < trials; ++t) {
    inv_total += static_cast<double>(inversions[static_cast<std::size_t>(t)]);
    total_sum += static_cast<double>(outcome.rows[static_cast<std::size_t>(t)].total_dislocation);
  }
  outcome.adjacent_inversion_freq = inv_total / pair_count;
  outcome.adjacent_floor = 0.5 * p / (1.0 - p);
  outcome.adjacent_sigma = std::sqrt(
      std::max(outcome.adjacent_inversion_freq * (1.0 - outcome.adjacent_inversion_freq), 1e-12) /
      pair_count);
  outcome.mean_total = total_sum / trials;
  outcome.total_floor = static_cast<double>(n) / 4.0 * p / (1.0 - p);
  double var = 0;
  for (int t = 0; t < trials; ++t) {
    const double d =
        static_cast<double>(outcome.rows[static_cast<std::size_t>(t)].total_dislocation) -
        outcome.mean_total;
    var += d * d;
  }
  outcome.total_sigma = std::sqrt(var / (trials - 1)) / std::sqrt(static_cast<double>(trials));

  const bool adjacent_ok =
      outcome.adjacent_inversion_freq >= outcome.adjacent_floor - 4.0 * outcome.adjacent_sigma;
  const bool total_ok = outcome.mean_total >= outcome.total_floor - 4.0 * outcome.total_sigma;
  outcome.pass = adjacent_ok && total_ok;
  return outcome;
}

std::int64_t min_white_in_windows(const std::vector<std::uint8_t>& is_white,
                                  std::int64_t window) {
  if (window < 1) throw std::invalid_argument("min_white_in_windows: window must be >= 1");
  const std::int64_t n = static_cast<std::int64_t>(is_white.size());
  if (window > n) return std::numeric_limits<std::int64_t>::max();  // no window exists
  std::int64_t count = 0;
  for (std::int64_t i = 0; i < window; ++i) count += is_white[static_cast<std::size_t>(i)];
  std::int64_t best = count;
  for (std::int64_t i = window; i < n; ++i) {
    count += is_white[static_cast<std::size_t>(i)];
    count -= is_white[static_cast<std::size_t>(i - window)];
    best = std::min(best, count);
  }
  return best;
}

UrnOutcome experiment_urn(std::int64_t n_balls, std::int64_t m_white, std::int64_t ell,
                          int trials, std::uint64_t seed, int threads, bool force) {
  if (trials < 1) throw std::invalid_argument("experiment_urn: trials must be >= 1");
  if (!force) {
    const bool shape_ok = 2 * m_white >= n_balls && n_balls >= 64 && m_white <= n_balls;
    const bool ell_ok = 8.0 * std::log2(static_cast<double>(n_balls)) <= static_cast<double>(ell) &&
                        ell <= m_white / 432;
    if (!shape_ok || !ell_ok) {
      throw std::invalid_argument(
          "experiment_urn: need M >= N/2 >= 32 and 8*log2(N) <= ell <= M/432 (use force to bypass)");
    }
  }

  std::atomic<std::int64_t> violations{0};
  std::atomic<int> next{0};
  auto work = [&]() {
    std::vector<std::uint8_t> urn(static_cast<std::size_t>(n_balls));
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= trials) return;
      for (std::int64_t i = 0; i < n_balls; ++i) {
        urn[static_cast<std::size_t>(i)] = i < m_white ? 1 : 0;
      }
      SplitRng rng(seed ^ static_cast<std::uint64_t>(t));
      // Drawing all balls without replacement = one uniform shuffle.
      for (std::int64_t i = n_balls - 1; i > 0; --i) {
        const std::int64_t j = static_cast<std::int64_t>(
            sample_uniform_int(rng, static_cast<std::uint64_t>(i + 1)));
        std::swap(urn[static_cast<std::size_t>(i)], urn[static_cast<std::size_t>(j)]);
      }
      const std::int64_t window = 54 * ell;
      if (window <= n_balls && min_white_in_windows(urn, window) <= ell) {
        violations.fetch_add(1);
      }
    }
  };
  const int workers = std::min(resolve_thread_count(threads), trials);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  UrnOutcome outcome;
  outcome.violations = violations.load();
  outcome.trials = trials;
  outcome.frequency = static_cast<double>(outcome.violations) / trials;
  outcome.bound = std::max(10.0 / trials,
                           10.0 * std::pow(static_cast<double>(n_balls), -6.0));
  outcome.pass = outcome.frequency <= outcome.bound;
  return outcome;
}

BasketScalingOutcome experiment_basket_scaling(const std::vector<std::int64_t>& sizes, double p,
                                               int trials, std::uint64_t seed, std::int64_t w_s,
                                               double c_max, double c_tot, double trend_slack,
                                               int threads) {
  ExperimentConfig config;
  config.algorithm = TrialAlgorithm::basket;
  config.sizes = sizes;
  config.trials = trials;
  config.p = p;
  config.q = p;
  config.master_seed = seed;
  config.w_s = w_s;
  config.input = InputKind::near_sorted;
  config.input_dislocation = w_s;
  config.threads = threads;
  const TrialRunOutcome run = run_trials(config);

  BasketScalingOutcome outcome;
  outcome.c_max = c_max;
  outcome.c_tot = c_tot;
  outcome.bounded = true;
  for (const SizeAggregate& agg : run.aggregates) {
    BasketScalingPoint point;
    point.n = agg.n;
    point.mean_max = agg.mean_max;
    point.mean_total = agg.mean_total;
    point.v_max = agg.mean_max / std::log(static_cast<double>(agg.n));
    point.v_tot = agg.mean_total / static_cast<double>(agg.n);
    outcome.bounded = outcome.bounded && point.v_max <= c_max && point.v_tot <= c_tot;
    outcome.points.push_back(point);
  }
  outcome.trend_ok =
      outcome.points.size() < 2 ||
      outcome.points.back().v_max <= trend_slack * outcome.points.front().v_max;
  outcome.pass = outcome.bounded && outcome.trend_ok;
  return outcome;
}

}  // namespace faultsort
