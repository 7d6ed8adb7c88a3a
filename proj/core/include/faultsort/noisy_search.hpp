#pragma once

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "faultsort/fault_model.hpp"
#include "faultsort/sequence.hpp"

namespace faultsort {

enum class RunMode { theoretical, practical };

// Constants driving one search. Theoretical mode uses the analysis constants
// (k = smallest odd >= 32(1-p)/(1-2p)^2, c = 250k); practical mode keeps the
// identical structure with desk-scale k and c. eta and walk_budget follow the
// same structural formulas in both modes.
struct WalkParams {
  int k = 5;                     // majority-vote width, odd
  std::int64_t c = 8;            // group size multiplier (group = c*d positions)
  std::int64_t d = 1;            // dislocation bound after the ln(m) clamp
  std::int64_t eta = 2;          // tail path length
  std::int64_t walk_budget = 0;  // step cap per walk
  RunMode mode = RunMode::practical;
  bool d_clamped = false;        // caller's d was raised to ceil(ln m)
};

WalkParams build_params(std::int64_t m, double p, std::int64_t d, RunMode mode,
                        int practical_k = 5, std::int64_t practical_c = 8);

// Logical padded view of a length-m sequence: the smallest 2*c*d_eff*2^h >= m
// with d_eff = 2d when padding is needed and d_eff = d when m already has the
// exact form. Dummy tail positions are sentinels that always compare larger
// than the query; no physical copy is made. Requires m >= 4*c*d.
struct PadPlan {
  std::int64_t m_real = 0;
  std::int64_t m_padded = 0;
  std::int64_t d_eff = 0;
  std::int64_t height = 0;  // h: number of complete doubling levels
  bool padded = false;
};
PadPlan pad_sequence(std::int64_t m, std::int64_t c, std::int64_t d);

// One lazily materialized noisy binary search tree T_parity. Vertices are
// implicit (depth, index) pairs; the per-leaf shared pointer cells are the
// only state. Levels 0..h are a complete binary tree; each depth-h vertex
// extends into a path of eta vertices whose end is the leaf. All vertices on
// a path share the leaf's interval and pointer cells; an internal vertex
// shares its left (right) cell with its leftmost (rightmost) leaf.
class NoisyTree {
 public:
  struct Vertex {
    std::int64_t depth = 0;
    std::int64_t index = 0;
    bool operator==(const Vertex&) const = default;
  };

  NoisyTree(const Sequence& seq, const PadPlan& pad, const WalkParams& params, int parity);

  Vertex root() const { return {0, 0}; }
  bool is_leaf(Vertex v) const { return v.depth == height_ + eta_; }
  int child_count(Vertex v) const;
  Vertex child(Vertex v, int which) const;
  Vertex parent(Vertex v) const;

  // Interval I(v) as 0-based positions [interval_min, interval_max].
  std::int64_t interval_min(Vertex v) const;
  std::int64_t interval_max(Vertex v) const;

  // The test operation: k comparisons downward from L(v), k upward from R(v),
  // then L(v) -= k, R(v) += k. Passes iff the left majority reports the query
  // larger and the right majority reports it smaller. Positions < 0 act as
  // -inf, positions >= m_real as +inf (this covers the padding dummies).
  bool test_vertex(detail::Oracle& oracle, std::int64_t x, Vertex v);

  // Current pointer cell values (for inspection; initialized on first touch).
  std::int64_t left_pointer(Vertex v) const;
  std::int64_t right_pointer(Vertex v) const;

  std::int64_t height() const { return height_; }
  std::int64_t eta() const { return eta_; }
  std::int64_t leaf_count() const { return std::int64_t{1} << height_; }

  // Guard for the compared-at-most-once lemma. Eligible when the pointer-gap
  // precondition c*d - 2d - 1 > 2*k*walk_budget holds (always true for
  // theoretical constants). Attach one set per search call; a repeat
  // comparison then raises logic_error.
  bool seen_tracking_eligible() const { return seen_eligible_; }
  void attach_seen_tracker(std::unordered_set<std::int64_t>* seen) { seen_ = seen; }

 private:
  std::int64_t leftmost_leaf(Vertex v) const;
  std::int64_t rightmost_leaf(Vertex v) const;
  std::int64_t& lcell(std::int64_t leaf);
  std::int64_t& rcell(std::int64_t leaf);
  bool compare_x_larger(detail::Oracle& oracle, std::int64_t x, std::int64_t pos);

  const Sequence* seq_;
  std::int64_t m_real_;
  std::int64_t group_width_;  // c * d_eff
  std::int64_t d_eff_;
  std::int64_t height_;
  std::int64_t eta_;
  int k_;
  int parity_;
  std::vector<std::int64_t> lcells_, rcells_;
  std::vector<bool> cell_init_;
  bool seen_eligible_ = false;
  std::unordered_set<std::int64_t>* seen_ = nullptr;  // non-owning
};

// Outcome of a full walk on one tree.
struct WalkOutcome {
  bool success = false;
  NoisyTree::Vertex leaf;
  std::int64_t steps = 0;
};

// Runs one walk to success or timeout. The walk consumes no randomness beyond
// the comparator: descend to the unique passing child, climb on all-fail
// (the root loops to itself), stay put when several children pass.
WalkOutcome random_walk(detail::Oracle& oracle, std::int64_t x, NoisyTree& tree,
                        std::int64_t budget);

enum class EstimateOrigin { walk0, walk1, both_timeout, small_input };

struct RankEstimate {
  std::int64_t tau = 1;  // 1-based rank estimate in [1, m+1]
  EstimateOrigin origin = EstimateOrigin::small_input;
  std::uint64_t comparisons = 0;
  std::int64_t steps = 0;     // lockstep steps consumed
  std::int64_t band = 0;      // |tau - rank| accuracy band: 2*c*d_eff (4*c*d on fallback)
  std::int64_t d_used = 0;    // d after clamping (pre-padding)
  bool d_clamped = false;
  bool padded = false;
};

// Approximate rank of x (not in S) against an approximately sorted S:
// m < 4cd short-circuits to tau = ceil((m+1)/2); otherwise two lockstep walks
// on T0/T1, the first to stand on a leaf wins (T0 preferred on a same-step
// double success) and tau = min(min I(leaf) + 1, m + 1); a double timeout
// falls back to the midpoint.
RankEstimate noisy_search(const FaultModel& model, const Sequence& seq, std::int64_t x,
                          std::int64_t d, const WalkParams& params);
RankEstimate noisy_search(const FaultModel& model, const Sequence& seq, std::int64_t x,
                          std::int64_t d, RunMode mode = RunMode::practical);

}  // namespace faultsort
