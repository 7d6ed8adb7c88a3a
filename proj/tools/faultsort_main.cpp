// faultsort: experiment CLI for approximate sorting under persistent
// comparison faults.
//
//   faultsort sort    --n 65536 --p 0.05 --q 0.05 --trials 50 --emit csv --out runs.csv
//   faultsort dsort   --n 65536 --p 0.2 --q 0.2 --report-bit-usage
//   faultsort bsort   --n 10000 --p 0.1 --q 0.1 --wS 64 --trials 10
//   faultsort search  --m 100000 --p 0.1 --queries 10000
//   faultsort experiment lower_bounds|urn|scaling [flags]
//
// Exit code is nonzero when an experiment's assertion band is violated.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "faultsort/basket_sort.hpp"
#include "faultsort/derand.hpp"
#include "faultsort/experiments.hpp"
#include "faultsort/harness.hpp"
#include "faultsort/math_util.hpp"
#include "faultsort/noisy_search.hpp"
#include "faultsort/rng.hpp"

namespace {

using namespace faultsort;

struct CommonFlags {
  std::int64_t n = 1 << 14;
  double p = 0.05;
  double q = -1.0;  // default: q = p
  std::uint64_t seed = 1;
  int trials = 1;
  std::string mode = "practical";
  std::string emit = "csv";
  std::string out;
  int threads = 0;
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--n", flags.n, "sequence length");
  cmd->add_option("--p", flags.p, "error probability upper bound");
  cmd->add_option("--q", flags.q, "error probability lower bound (default: p)");
  cmd->add_option("--seed", flags.seed, "master seed");
  cmd->add_option("--trials", flags.trials, "trial count");
  cmd->add_option("--mode", flags.mode, "theoretical|practical")
      ->check(CLI::IsMember({"theoretical", "practical"}));
  cmd->add_option("--emit", flags.emit, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", flags.out, "output path for trial rows");
  cmd->add_option("--threads", flags.threads, "worker threads (default: FAULTSORT_THREADS)");
  cmd->add_flag("--timing", flags.timing, "write measured wall times into files "
                                          "(breaks byte-identical re-runs)");
}

ExperimentConfig to_config(const CommonFlags& flags, TrialAlgorithm algo) {
  ExperimentConfig config;
  config.algorithm = algo;
  config.sizes = {flags.n};
  config.trials = flags.trials;
  config.p = flags.p;
  config.q = flags.q < 0 ? flags.p : flags.q;
  config.master_seed = flags.seed;
  config.mode = flags.mode == "theoretical" ? RunMode::theoretical : RunMode::practical;
  config.threads = flags.threads;
  config.out_path = flags.out;
  config.format = flags.emit == "json" ? EmitFormat::jsonl : EmitFormat::csv;
  config.timing_in_files = flags.timing;
  return config;
}

void print_summary(const TrialRunOutcome& outcome) {
  for (const SizeAggregate& agg : outcome.aggregates) {
    std::printf(
        "n=%lld trials=%zu mean_max=%.2f (sd %.2f) mean_total=%.1f (sd %.1f) "
        "mean_comparisons=%.3g mean_ms=%.1f\n",
        static_cast<long long>(agg.n),
        outcome.rows.size() / std::max<std::size_t>(1, outcome.aggregates.size()), agg.mean_max,
        agg.stddev_max, agg.mean_total, agg.stddev_total, agg.mean_comparisons, agg.mean_wall_ms);
  }
}

int run_sort(const CommonFlags& flags, bool assume_independent) {
  ExperimentConfig config = to_config(flags, TrialAlgorithm::riffle);
  config.shuffle = !assume_independent;
  const TrialRunOutcome outcome = run_trials(config);
  print_summary(outcome);
  return 0;
}

int run_dsort(const CommonFlags& flags, bool report_bits) {
  ExperimentConfig config = to_config(flags, TrialAlgorithm::derand);
  const TrialRunOutcome outcome = run_trials(config);
  print_summary(outcome);
  if (report_bits) {
    // Re-run one instance to surface the bit accounting.
    FaultModel model(config.p, config.q, config.master_seed);
    DerandConfig dc;
    dc.mode = config.mode;
    const DerandResult r = derand_riffle_sort(model, Sequence::identity(flags.n), dc);
    std::printf("bit usage: eta=%lld |F|=%lld harvested=%llu consumed=%llu fallback=%s\n",
                static_cast<long long>(r.eta), static_cast<long long>(r.f_size),
                static_cast<unsigned long long>(r.bits_harvested),
                static_cast<unsigned long long>(r.bits_consumed),
                r.used_fallback ? r.fallback_reason.c_str() : "none");
  }
  return 0;
}

int run_bsort(const CommonFlags& flags, std::int64_t w_s) {
  ExperimentConfig config = to_config(flags, TrialAlgorithm::basket);
  config.w_s = w_s;
  config.input = InputKind::near_sorted;
  config.input_dislocation = w_s;
  const TrialRunOutcome outcome = run_trials(config);
  print_summary(outcome);
  return 0;
}

int run_search(const CommonFlags& flags, std::int64_t m, std::int64_t d, int queries) {
  FaultModel model(flags.p, flags.q < 0 ? flags.p : flags.q, flags.seed);
  std::vector<std::int64_t> items(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) items[static_cast<std::size_t>(i)] = 2 * (i + 1);
  const Sequence seq{std::move(items)};
  seq.ensure_index();
  if (d <= 0) d = ceil_ln(m);
  const RunMode mode =
      flags.mode == "theoretical" ? RunMode::theoretical : RunMode::practical;
  const WalkParams params = build_params(m, model.p(), d, mode);

  SplitRng rng(flags.seed);
  std::int64_t within = 0;
  std::uint64_t total_comparisons = 0;
  std::int64_t band = 0;
  for (int i = 0; i < queries; ++i) {
    const std::int64_t x = 2 * static_cast<std::int64_t>(sample_uniform_int(rng, m + 1)) + 1;
    const RankEstimate est = noisy_search(model, seq, x, d, params);
    const std::int64_t rank = std::min((x + 1) / 2, m) + (x > 2 * m ? 1 : 0);
    if (std::llabs(est.tau - rank) <= est.band) ++within;
    total_comparisons += est.comparisons;
    band = est.band;
  }
  std::printf("m=%lld d=%lld queries=%d within-band=%.4f band=%lld mean-comparisons=%.1f\n",
              static_cast<long long>(m), static_cast<long long>(d), queries,
              static_cast<double>(within) / queries, static_cast<long long>(band),
              static_cast<double>(total_comparisons) / queries);
  return 0;
}

int run_experiment(const std::string& name, const CommonFlags& flags, std::int64_t urn_m,
                   std::int64_t urn_ell, bool force) {
  if (name == "lower_bounds") {
    const LowerBoundOutcome outcome = experiment_lower_bounds(
        flags.n, flags.p, std::max(flags.trials, 2), flags.seed, flags.threads);
    std::printf("adjacent inversion freq=%.5f floor=%.5f sigma=%.6f\n",
                outcome.adjacent_inversion_freq, outcome.adjacent_floor, outcome.adjacent_sigma);
    std::printf("mean total dislocation=%.1f floor=%.1f sigma=%.2f\n", outcome.mean_total,
                outcome.total_floor, outcome.total_sigma);
    std::printf("seed=%llu %s\n", static_cast<unsigned long long>(flags.seed),
                outcome.pass ? "PASS" : "FAIL");
    return outcome.pass ? 0 : 1;
  }
  if (name == "urn") {
    const UrnOutcome outcome = experiment_urn(flags.n, urn_m, urn_ell, flags.trials, flags.seed,
                                              flags.threads, force);
    std::printf("violations=%lld/%d freq=%.6f bound=%.6f %s\n",
                static_cast<long long>(outcome.violations), outcome.trials, outcome.frequency,
                outcome.bound, outcome.pass ? "PASS" : "FAIL");
    return outcome.pass ? 0 : 1;
  }
  if (name == "bscaling") {
    std::vector<std::int64_t> sizes;
    for (std::int64_t n = 1 << 10; n <= flags.n; n <<= 1) sizes.push_back(n);
    const BasketScalingOutcome outcome = experiment_basket_scaling(
        sizes, flags.p, std::max(flags.trials, 2), flags.seed, 64, 8.0, 2.0, 1.05,
        flags.threads);
    for (const BasketScalingPoint& point : outcome.points) {
      std::printf("n=%lld mean_max=%.2f max/ln=%.3f total/n=%.3f\n",
                  static_cast<long long>(point.n), point.mean_max, point.v_max, point.v_tot);
    }
    std::printf("bounded=%d trend_ok=%d %s\n", outcome.bounded, outcome.trend_ok,
                outcome.pass ? "PASS" : "FAIL");
    return outcome.pass ? 0 : 1;
  }
  if (name == "scaling") {
    ExperimentConfig config = to_config(flags, TrialAlgorithm::riffle);
    config.sizes.clear();
    for (std::int64_t n = 1 << 12; n <= flags.n; n <<= 1) config.sizes.push_back(n);
    const TrialRunOutcome outcome = run_trials(config);
    print_summary(outcome);
    bool pass = true;
    double lo = 1e300, hi = 0;
    for (const SizeAggregate& agg : outcome.aggregates) {
      const double v = agg.mean_max / std::log(static_cast<double>(agg.n));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    pass = (hi - lo) / lo < 0.5;
    std::printf("max-dislocation/ln(n) spread=%.3f %s\n", (hi - lo) / lo, pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
  }
  std::fprintf(stderr, "unknown experiment '%s'\n", name.c_str());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"approximate sorting under persistent random comparison faults"};
  app.require_subcommand(1);

  CommonFlags flags;

  CLI::App* sort_cmd = app.add_subcommand("sort", "run RiffleSort trials");
  add_common(sort_cmd, flags);
  bool assume_independent = false;
  sort_cmd->add_flag("--assume-independent-order", assume_independent,
                     "skip the initial shuffle");

  CLI::App* dsort_cmd = app.add_subcommand("dsort", "run derandomized RiffleSort trials");
  add_common(dsort_cmd, flags);
  bool report_bits = false;
  dsort_cmd->add_flag("--report-bit-usage", report_bits, "print bit-farm accounting");

  CLI::App* bsort_cmd = app.add_subcommand("bsort", "run BasketSort trials");
  add_common(bsort_cmd, flags);
  std::int64_t w_s = 64;
  bsort_cmd->add_option("--wS", w_s, "initial window size (and input dislocation bound)");

  CLI::App* search_cmd = app.add_subcommand("search", "run NoisySearch queries");
  add_common(search_cmd, flags);
  std::int64_t m = 100000, d = 0;
  int queries = 10000;
  search_cmd->add_option("--m", m, "sequence length");
  search_cmd->add_option("--d", d, "dislocation bound (default ceil(ln m))");
  search_cmd->add_option("--queries", queries, "query count");

  CLI::App* exp_cmd = app.add_subcommand("experiment", "statistical experiments (CI-gated)");
  add_common(exp_cmd, flags);
  std::string exp_name;
  std::int64_t urn_m = 1 << 16, urn_ell = 136;
  bool force = false;
  exp_cmd->add_option("name", exp_name, "lower_bounds|urn|scaling|bscaling")->required();
  exp_cmd->add_option("--M", urn_m, "urn: white ball count");
  exp_cmd->add_option("--ell", urn_ell, "urn: ell parameter");
  exp_cmd->add_flag("--force", force, "urn: bypass parameter preconditions");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sort_cmd->parsed()) return run_sort(flags, assume_independent);
    if (dsort_cmd->parsed()) return run_dsort(flags, report_bits);
    if (bsort_cmd->parsed()) return run_bsort(flags, w_s);
    if (search_cmd->parsed()) return run_search(flags, m, d, queries);
    if (exp_cmd->parsed()) return run_experiment(exp_name, flags, urn_m, urn_ell, force);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
