#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "faultsort/derand.hpp"
#include "faultsort/riffle_sort.hpp"
#include "faultsort/sequence.hpp"

namespace faultsort {

struct TrialReport {
  std::uint64_t trial_id = 0;
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  double p = 0.0;
  double q = 0.0;
  std::string algorithm;
  std::int64_t max_dislocation = 0;
  std::int64_t total_dislocation = 0;
  std::uint64_t comparisons = 0;
  double wall_time_ms = 0.0;
  std::string flags;  // semicolon-joined tokens (clamps, fallbacks, budget aborts)
};

enum class TrialAlgorithm { riffle, derand, basket };
enum class InputKind { identity, shuffled, near_sorted, adversarial };
enum class EmitFormat { csv, jsonl };

struct ExperimentConfig {
  std::string name = "trials";
  TrialAlgorithm algorithm = TrialAlgorithm::riffle;
  std::vector<std::int64_t> sizes;  // strictly increasing
  int trials = 1;
  double p = 0.0;
  double q = 0.0;
  std::uint64_t master_seed = 1;
  RunMode mode = RunMode::practical;
  bool shuffle = true;               // riffle only
  std::int64_t w_s = 64;             // basket only
  InputKind input = InputKind::identity;
  std::int64_t input_dislocation = 64;  // near_sorted block width
  int threads = 0;                   // 0: FAULTSORT_THREADS or hardware
  std::string out_path;              // empty: no file emission
  EmitFormat format = EmitFormat::csv;
  // Timings are measured but written to files as 0.0 unless set, keeping
  // re-runs byte-identical.
  bool timing_in_files = false;
  RiffleConfig riffle;   // mode/shuffle/seed fields are overwritten per trial
  DerandConfig derand;
};

struct SizeAggregate {
  std::int64_t n = 0;
  double mean_max = 0.0, stddev_max = 0.0;
  double mean_total = 0.0, stddev_total = 0.0;
  double mean_comparisons = 0.0;
  double mean_wall_ms = 0.0;
};

struct TrialRunOutcome {
  std::vector<TrialReport> rows;  // ordered by (size, trial_id)
  std::vector<SizeAggregate> aggregates;
};

// Runs trials on a worker pool (each trial owns its model and RNG stream,
// seed = master ^ trial ordinal) and aggregates per size. Deterministic
// results for a fixed master seed regardless of scheduling.
TrialRunOutcome run_trials(const ExperimentConfig& config);

// CSV column order matches the TrialReport fields; first line is the header.
void write_csv(std::ostream& out, const std::vector<TrialReport>& rows, bool with_timing);
void write_jsonl(std::ostream& out, const std::vector<TrialReport>& rows, bool with_timing);

// Seeded input generators.
Sequence make_input(InputKind kind, std::int64_t n, std::int64_t dislocation_bound,
                    const FaultModel& model, SplitRng& rng);
// Random permutation with dislocation <= bound (independent block shuffles).
Sequence near_sorted_permutation(std::int64_t n, std::int64_t bound, SplitRng& rng);

int resolve_thread_count(int requested);

}  // namespace faultsort
