#include "faultsort/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "faultsort/basket_sort.hpp"
#include "faultsort/sampling.hpp"

namespace faultsort {

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FAULTSORT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

Sequence near_sorted_permutation(std::int64_t n, std::int64_t bound, SplitRng& rng) {
  std::vector<std::int64_t> items(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) items[static_cast<std::size_t>(i)] = i + 1;
  if (bound <= 1 || n <= 1) return Sequence(std::move(items));
  const std::int64_t block = std::min(bound, n);
  // Independent block shuffles with a random phase: dislocation < block.
  std::int64_t start = static_cast<std::int64_t>(sample_uniform_int(rng, static_cast<std::uint64_t>(block)));
  if (start == 0) start = block;
  std::int64_t lo = 0;
  while (lo < n) {
    const std::int64_t hi = std::min(lo == 0 ? start : lo + block, n);
    for (std::int64_t i = hi - 1; i > lo; --i) {
      const std::int64_t j =
          lo + static_cast<std::int64_t>(sample_uniform_int(rng, static_cast<std::uint64_t>(i - lo + 1)));
      std::swap(items[static_cast<std::size_t>(i)], items[static_cast<std::size_t>(j)]);
    }
    lo = hi;
  }
  return Sequence(std::move(items));
}

Sequence make_input(InputKind kind, std::int64_t n, std::int64_t dislocation_bound,
                    const FaultModel& model, SplitRng& rng) {
  switch (kind) {
    case InputKind::identity:
      return Sequence::identity(n);
    case InputKind::shuffled: {
      Sequence seq = Sequence::identity(n);
      return fisher_yates(seq, rng);
    }
    case InputKind::near_sorted:
      return near_sorted_permutation(n, dislocation_bound, rng);
    case InputKind::adversarial:
      return adversarial_order(model, n);
  }
  throw std::logic_error("make_input: unknown input kind");
}

namespace {

std::string algorithm_name(TrialAlgorithm algo) {
  switch (algo) {
    case TrialAlgorithm::riffle: return "riffle_sort";
    case TrialAlgorithm::derand: return "derand_riffle_sort";
    case TrialAlgorithm::basket: return "basket_sort";
  }
  return "?";
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += ';';
    out += f;
  }
  return out;
}

TrialReport run_one(const ExperimentConfig& config, std::int64_t n, std::uint64_t ordinal) {
  TrialReport row;
  row.trial_id = ordinal;
  row.seed = config.master_seed ^ ordinal;
  row.n = n;
  row.p = config.p;
  row.q = config.q;
  row.algorithm = algorithm_name(config.algorithm);

  const auto start = std::chrono::steady_clock::now();
  FaultModel model(config.p, config.q, row.seed);
  SplitRng rng(mix64(row.seed ^ 0x8BADF00DULL));
  SplitRng input_rng = rng.split(1);
  const Sequence input =
      make_input(config.input, n, config.input_dislocation, model, input_rng);

  Sequence output;
  std::vector<std::string> flags;
  switch (config.algorithm) {
    case TrialAlgorithm::riffle: {
      RiffleConfig rc = config.riffle;
      rc.mode = config.mode;
      rc.shuffle = config.shuffle;
      rc.rng_seed = mix64(row.seed ^ 0x1EAFULL);
      RiffleResult r = riffle_sort(model, input, rc);
      output = std::move(r.sequence);
      row.comparisons = r.comparisons;
      flags = std::move(r.flags);
      break;
    }
    case TrialAlgorithm::derand: {
      DerandConfig dc = config.derand;
      dc.mode = config.mode;
      DerandResult r = derand_riffle_sort(model, input, dc);
      output = std::move(r.sequence);
      row.comparisons = r.comparisons;
      flags = std::move(r.flags);
      break;
    }
    case TrialAlgorithm::basket: {
      BasketSortResult r = basket_sort(model, input, config.w_s);
      output = std::move(r.sequence);
      row.comparisons = r.comparisons;
      if (r.w_clamped) flags.push_back("w_clamped");
      break;
    }
  }

  const DislocationReport report = dislocation_report(output);
  row.max_dislocation = report.max_dislocation;
  row.total_dislocation = report.total_dislocation;
  row.flags = join_flags(flags);
  row.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace

TrialRunOutcome run_trials(const ExperimentConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
  if (config.sizes.empty()) throw std::invalid_argument("run_trials: sizes must be non-empty");
  for (std::size_t i = 1; i < config.sizes.size(); ++i) {
    if (config.sizes[i] <= config.sizes[i - 1]) {
      throw std::invalid_argument("run_trials: sizes must be strictly increasing");
    }
  }

  const std::size_t total = config.sizes.size() * static_cast<std::size_t>(config.trials);
  TrialRunOutcome outcome;
  outcome.rows.resize(total);

  std::atomic<std::size_t> next{0};
  const int workers = std::min<int>(resolve_thread_count(config.threads),
                                    static_cast<int>(total));
  auto work = [&]() {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= total) return;
      const std::int64_t n = config.sizes[task / static_cast<std::size_t>(config.trials)];
      outcome.rows[task] = run_one(config, n, static_cast<std::uint64_t>(task));
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (std::size_t s = 0; s < config.sizes.size(); ++s) {
    SizeAggregate agg;
    agg.n = config.sizes[s];
    const std::size_t lo = s * static_cast<std::size_t>(config.trials);
    const std::size_t hi = lo + static_cast<std::size_t>(config.trials);
    double sum_max = 0, sum_total = 0, sum_comp = 0, sum_ms = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      sum_max += static_cast<double>(outcome.rows[i].max_dislocation);
      sum_total += static_cast<double>(outcome.rows[i].total_dislocation);
      sum_comp += static_cast<double>(outcome.rows[i].comparisons);
      sum_ms += outcome.rows[i].wall_time_ms;
    }
    const double inv = 1.0 / config.trials;
    agg.mean_max = sum_max * inv;
    agg.mean_total = sum_total * inv;
    agg.mean_comparisons = sum_comp * inv;
    agg.mean_wall_ms = sum_ms * inv;
    double var_max = 0, var_total = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double dm = static_cast<double>(outcome.rows[i].max_dislocation) - agg.mean_max;
      const double dt = static_cast<double>(outcome.rows[i].total_dislocation) - agg.mean_total;
      var_max += dm * dm;
      var_total += dt * dt;
    }
    if (config.trials > 1) {
      agg.stddev_max = std::sqrt(var_max / (config.trials - 1));
      agg.stddev_total = std::sqrt(var_total / (config.trials - 1));
    }
    outcome.aggregates.push_back(agg);
  }

  if (!config.out_path.empty()) {
    std::ofstream out(config.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("run_trials: cannot open output path " + config.out_path);
    if (config.format == EmitFormat::csv) {
      write_csv(out, outcome.rows, config.timing_in_files);
    } else {
      write_jsonl(out, outcome.rows, config.timing_in_files);
    }
    if (!out) throw std::runtime_error("run_trials: write failed for " + config.out_path);
  }
  return outcome;
}

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<TrialReport>& rows, bool with_timing) {
  out << "trial_id,seed,n,p,q,algorithm,max_dislocation,total_dislocation,comparisons,"
         "wall_time_ms,flags\n";
  for (const TrialReport& r : rows) {
    out << r.trial_id << ',' << r.seed << ',' << r.n << ',' << format_double(r.p) << ','
        << format_double(r.q) << ',' << r.algorithm << ',' << r.max_dislocation << ','
        << r.total_dislocation << ',' << r.comparisons << ','
        << format_double(with_timing ? r.wall_time_ms : 0.0) << ',' << r.flags << '\n';
  }
}

void write_jsonl(std::ostream& out, const std::vector<TrialReport>& rows, bool with_timing) {
  for (const TrialReport& r : rows) {
    nlohmann::ordered_json j;
    j["trial_id"] = r.trial_id;
    j["seed"] = r.seed;
    j["n"] = r.n;
    j["p"] = r.p;
    j["q"] = r.q;
    j["algorithm"] = r.algorithm;
    j["max_dislocation"] = r.max_dislocation;
    j["total_dislocation"] = r.total_dislocation;
    j["comparisons"] = r.comparisons;
    j["wall_time_ms"] = with_timing ? r.wall_time_ms : 0.0;
    j["flags"] = r.flags;
    out << j.dump() << '\n';
  }
}

}  // namespace faultsort
