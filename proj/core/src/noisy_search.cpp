#include "faultsort/noisy_search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "faultsort/math_util.hpp"

namespace faultsort {

WalkParams build_params(std::int64_t m, double p, std::int64_t d, RunMode mode,
                        int practical_k, std::int64_t practical_c) {
  if (m < 1) throw std::invalid_argument("build_params: m must be >= 1");
  if (!(p >= 0.0 && p < 0.5)) throw std::invalid_argument("build_params: need 0 <= p < 1/2");
  if (d < 1) throw std::invalid_argument("build_params: d must be >= 1");

  WalkParams params;
  params.mode = mode;
  if (mode == RunMode::theoretical) {
    const double target = 32.0 * (1.0 - p) / ((1.0 - 2.0 * p) * (1.0 - 2.0 * p));
    std::int64_t k = static_cast<std::int64_t>(std::ceil(target - 1e-9));
    if (k % 2 == 0) ++k;
    params.k = static_cast<int>(k);
    params.c = 250 * k;
  } else {
    if (practical_k < 1 || practical_k % 2 == 0) {
      throw std::invalid_argument("build_params: practical k must be odd and positive");
    }
    if (practical_c < 1) throw std::invalid_argument("build_params: practical c must be >= 1");
    params.k = practical_k;
    params.c = practical_c;
  }
  params.d = std::max(d, ceil_ln(m));
  params.d_clamped = params.d > d;
  params.eta = 2 + 4 * ceil_log_int(m, 7);
  params.walk_budget = 120 * ceil_ln(m);
  return params;
}

PadPlan pad_sequence(std::int64_t m, std::int64_t c, std::int64_t d) {
  if (m < 4 * c * d) {
    throw std::invalid_argument("pad_sequence: m < 4cd is the caller's short-circuit case");
  }
  PadPlan plan;
  plan.m_real = m;
  const std::int64_t base = 2 * c * d;
  if (m % base == 0 && is_power_of_two(static_cast<std::uint64_t>(m / base))) {
    plan.m_padded = m;
    plan.d_eff = d;
    plan.height = ceil_log2(static_cast<std::uint64_t>(m / base));
    plan.padded = false;
  } else {
    plan.d_eff = 2 * d;
    const std::int64_t unit = 2 * c * plan.d_eff;
    plan.height = ceil_log_int(ceil_div(m, unit), 2);
    plan.m_padded = unit << plan.height;
    plan.padded = true;
  }
  return plan;
}

NoisyTree::NoisyTree(const Sequence& seq, const PadPlan& pad, const WalkParams& params,
                     int parity)
    : seq_(&seq),
      m_real_(pad.m_real),
      group_width_(pad.d_eff * params.c),
      d_eff_(pad.d_eff),
      height_(pad.height),
      eta_(params.eta),
      k_(params.k),
      parity_(parity) {
  const std::int64_t leaves = leaf_count();
  lcells_.assign(static_cast<std::size_t>(leaves), 0);
  rcells_.assign(static_cast<std::size_t>(leaves), 0);
  cell_init_.assign(static_cast<std::size_t>(leaves), false);
  // Compared-at-most-once holds when the pointers cannot travel far enough to
  // collide: c*d - 2d - 1 > 2*k*budget.
  const std::int64_t gap = group_width_ - 2 * d_eff_ - 1;
  seen_eligible_ = gap > 2 * static_cast<std::int64_t>(params.k) * params.walk_budget;
}

int NoisyTree::child_count(Vertex v) const {
  if (v.depth < height_) return 2;
  if (v.depth < height_ + eta_) return 1;
  return 0;
}

NoisyTree::Vertex NoisyTree::child(Vertex v, int which) const {
  if (v.depth < height_) return {v.depth + 1, 2 * v.index + which};
  return {v.depth + 1, v.index};
}

NoisyTree::Vertex NoisyTree::parent(Vertex v) const {
  if (v.depth == 0) return v;  // the root loops to itself
  if (v.depth <= height_) return {v.depth - 1, v.index / 2};
  return {v.depth - 1, v.index};
}

std::int64_t NoisyTree::leftmost_leaf(Vertex v) const {
  if (v.depth >= height_) return v.index;
  return v.index << (height_ - v.depth);
}

std::int64_t NoisyTree::rightmost_leaf(Vertex v) const {
  if (v.depth >= height_) return v.index;
  return ((v.index + 1) << (height_ - v.depth)) - 1;
}

std::int64_t NoisyTree::interval_min(Vertex v) const {
  const std::int64_t group = 2 * leftmost_leaf(v) + parity_;
  return group * group_width_;
}

std::int64_t NoisyTree::interval_max(Vertex v) const {
  const std::int64_t group = 2 * rightmost_leaf(v) + parity_;
  return (group + 1) * group_width_ - 1;
}

std::int64_t& NoisyTree::lcell(std::int64_t leaf) {
  if (!cell_init_[static_cast<std::size_t>(leaf)]) {
    const Vertex leaf_v{height_ + eta_, leaf};
    lcells_[static_cast<std::size_t>(leaf)] = interval_min(leaf_v) - d_eff_ - 1;
    rcells_[static_cast<std::size_t>(leaf)] = interval_max(leaf_v) + d_eff_;
    cell_init_[static_cast<std::size_t>(leaf)] = true;
  }
  return lcells_[static_cast<std::size_t>(leaf)];
}

std::int64_t& NoisyTree::rcell(std::int64_t leaf) {
  lcell(leaf);  // shared lazy init
  return rcells_[static_cast<std::size_t>(leaf)];
}

std::int64_t NoisyTree::left_pointer(Vertex v) const {
  return const_cast<NoisyTree*>(this)->lcell(leftmost_leaf(v));
}

std::int64_t NoisyTree::right_pointer(Vertex v) const {
  return const_cast<NoisyTree*>(this)->rcell(rightmost_leaf(v));
}

bool NoisyTree::compare_x_larger(detail::Oracle& oracle, std::int64_t x, std::int64_t pos) {
  if (pos < 0) return true;        // -inf element: x is larger
  if (pos >= m_real_) return false;  // +inf / padding dummy: x is smaller
  if (seen_ && !seen_->insert(pos).second) {
    throw std::logic_error("NoisyTree: position compared twice within one walk set");
  }
  return oracle.reports_larger(x, (*seq_)[pos]);
}

bool NoisyTree::test_vertex(detail::Oracle& oracle, std::int64_t x, Vertex v) {
  std::int64_t& left = lcell(leftmost_leaf(v));
  std::int64_t& right = rcell(rightmost_leaf(v));
  int left_larger = 0;
  int right_smaller = 0;
  for (int t = 0; t < k_; ++t) {
    if (compare_x_larger(oracle, x, left - t)) ++left_larger;
  }
  for (int t = 0; t < k_; ++t) {
    if (!compare_x_larger(oracle, x, right + t)) ++right_smaller;
  }
  left -= k_;
  right += k_;
  return left_larger > k_ / 2 && right_smaller > k_ / 2;
}

namespace {

struct Walker {
  NoisyTree* tree;
  NoisyTree::Vertex at;

  // One time step: test all children of the current vertex and move.
  // Returns true when the walk stands on a leaf afterwards.
  bool step(detail::Oracle& oracle, std::int64_t x) {
    const int nc = tree->child_count(at);
    int passes = 0;
    NoisyTree::Vertex passed{};
    for (int i = 0; i < nc; ++i) {
      const NoisyTree::Vertex u = tree->child(at, i);
      if (tree->test_vertex(oracle, x, u)) {
        ++passes;
        passed = u;
      }
    }
    if (passes == 1) {
      at = passed;
    } else if (passes == 0) {
      at = tree->parent(at);
    }  // more than one pass: stay
    return tree->is_leaf(at);
  }
};

}  // namespace

WalkOutcome random_walk(detail::Oracle& oracle, std::int64_t x, NoisyTree& tree,
                        std::int64_t budget) {
  Walker walker{&tree, tree.root()};
  WalkOutcome out;
  for (std::int64_t step = 1; step <= budget; ++step) {
    out.steps = step;
    if (walker.step(oracle, x)) {
      out.success = true;
      out.leaf = walker.at;
      return out;
    }
  }
  return out;
}

RankEstimate noisy_search(const FaultModel& model, const Sequence& seq, std::int64_t x,
                          std::int64_t d, const WalkParams& params) {
  const std::int64_t m = seq.size();
  if (seq.contains(x)) throw std::invalid_argument("noisy_search: x must not be in S");
  if (d < 1) throw std::invalid_argument("noisy_search: d must be >= 1");

  RankEstimate est;
  CompStats stats;
  detail::Oracle oracle{&model, &stats};

  const std::int64_t d_used = std::max({d, params.d, ceil_ln(m), std::int64_t{1}});
  est.d_used = d_used;
  est.d_clamped = d_used > d;
  const std::int64_t c = params.c;

  if (m < 4 * c * d_used) {
    est.tau = (m + 2) / 2;  // ceil((m+1)/2)
    est.origin = EstimateOrigin::small_input;
    est.band = 4 * c * d_used;
    return est;
  }

  const PadPlan pad = pad_sequence(m, c, d_used);
  est.padded = pad.padded;
  est.band = 2 * c * pad.d_eff;

  WalkParams local = params;
  local.d = d_used;
  local.eta = 2 + 4 * ceil_log_int(pad.m_padded, 7);
  local.walk_budget = 120 * ceil_ln(pad.m_padded);

  NoisyTree t0(seq, pad, local, 0);
  NoisyTree t1(seq, pad, local, 1);
  std::unordered_set<std::int64_t> seen;
  if (t0.seen_tracking_eligible()) {
    t0.attach_seen_tracker(&seen);
    t1.attach_seen_tracker(&seen);
  }
  Walker w0{&t0, t0.root()};
  Walker w1{&t1, t1.root()};

  const NoisyTree* winner_tree = nullptr;
  NoisyTree::Vertex winner_leaf{};
  for (std::int64_t step = 1; step <= local.walk_budget; ++step) {
    est.steps = step;
    if (w0.step(oracle, x)) {
      winner_tree = &t0;
      winner_leaf = w0.at;
      est.origin = EstimateOrigin::walk0;
      break;
    }
    if (w1.step(oracle, x)) {
      winner_tree = &t1;
      winner_leaf = w1.at;
      est.origin = EstimateOrigin::walk1;
      break;
    }
  }

  if (winner_tree != nullptr) {
    est.tau = std::min(winner_tree->interval_min(winner_leaf) + 1, m + 1);
  } else {
    est.tau = (m + 2) / 2;
    est.origin = EstimateOrigin::both_timeout;
  }
  est.comparisons = stats.comparisons;
  return est;
}

RankEstimate noisy_search(const FaultModel& model, const Sequence& seq, std::int64_t x,
                          std::int64_t d, RunMode mode) {
  const WalkParams params = build_params(std::max<std::int64_t>(seq.size(), 1), model.p(), d, mode);
  return noisy_search(model, seq, x, d, params);
}

}  // namespace faultsort
