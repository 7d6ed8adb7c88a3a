#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "faultsort/harness.hpp"
#include "faultsort/sequence.hpp"

namespace faultsort {

// Independent O(n^2) recomputation of ranks and dislocations; the oracle all
// derived expectations are checked against.
DislocationReport brute_force_oracle(const Sequence& seq, bool per_element = false);

struct LowerBoundOutcome {
  double adjacent_inversion_freq = 0.0;
  double adjacent_floor = 0.0;   // (1/2) p/(1-p)
  double adjacent_sigma = 0.0;
  double mean_total = 0.0;
  double total_floor = 0.0;      // (n/4) p/(1-p)
  double total_sigma = 0.0;
  bool pass = false;
  std::vector<TrialReport> rows;
};

// RiffleSort output must sit at or above the universal floors: adjacent pairs
// (2k+1, 2k+2) inverted with frequency >= (1/2)p/(1-p) - 4 sigma and mean
// total dislocation >= (n/4)p/(1-p) - 4 sigma. Requires p == q > 0.
LowerBoundOutcome experiment_lower_bounds(std::int64_t n, double p, int trials,
                                          std::uint64_t seed, int threads = 0);

// Minimum number of white balls over all contiguous windows of the given
// length (0 when the sequence is shorter than the window).
std::int64_t min_white_in_windows(const std::vector<std::uint8_t>& is_white,
                                  std::int64_t window);

struct UrnOutcome {
  std::int64_t violations = 0;
  int trials = 0;
  double frequency = 0.0;
  double bound = 0.0;  // max(10/trials, 10*N^-6)
  bool pass = false;
};

// Urn draws without replacement: a violation is a trial whose drawn sequence
// contains a 54*ell window with <= ell white balls. Enforces the lemma's
// preconditions M >= N/2 >= 32 and 8*log2(N) <= ell <= M/432 unless force.
UrnOutcome experiment_urn(std::int64_t n_balls, std::int64_t m_white, std::int64_t ell,
                          int trials, std::uint64_t seed, int threads = 0,
                          bool force = false);

struct BasketScalingPoint {
  std::int64_t n = 0;
  double mean_max = 0.0;
  double mean_total = 0.0;
  double v_max = 0.0;  // mean_max / ln n
  double v_tot = 0.0;  // mean_total / n
};

struct BasketScalingOutcome {
  std::vector<BasketScalingPoint> points;
  double c_max = 0.0;
  double c_tot = 0.0;
  bool bounded = false;
  bool trend_ok = false;  // v_max non-increasing across the grid (with slack)
  bool pass = false;
};

// BasketSort scaling on near-sorted inputs (dislocation <= w_S): mean
// max-dislocation / ln n stays under the calibrated c_max with a
// non-increasing trend, and mean total / n stays under c_tot.
BasketScalingOutcome experiment_basket_scaling(const std::vector<std::int64_t>& sizes, double p,
                                               int trials, std::uint64_t seed,
                                               std::int64_t w_s = 64, double c_max = 8.0,
                                               double c_tot = 2.0, double trend_slack = 1.05,
                                               int threads = 0);

}  // namespace faultsort
