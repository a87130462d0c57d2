#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bmit/data.hpp"
#include "bmit/discretize.hpp"

namespace bmit {

struct TestConfig {
  /// Prior probability of independence; also the decision threshold.
  double prior_independence = 0.5;
  /// Dirichlet hyperparameter replicated over every cell and marginal bin.
  double hyper = 1.0;
  /// Number of trailing p(t) values whose standard deviation is tested.
  std::size_t window = 3;
  double std_threshold = 1e-3;
  /// Unset means min(63, #distinct x - 1, #distinct y - 1).
  std::optional<std::size_t> max_iterations;
  /// Largest number of conditioning-boundary tuples offered per iteration.
  std::size_t cond_candidate_cap = 256;
  /// Whether conditioning moves contribute to p(t) or only compete in the argmax.
  bool cond_in_pt = true;
  /// Worker threads for candidate evaluation; 0 picks the hardware count.
  /// Never changes results.
  std::size_t threads = 0;

  void validate() const;
};

/// One conditioning-axis cut of a conditioning move.
struct CondCut {
  std::size_t axis;   // 2 + position in AxisVars::cond
  std::size_t index;  // index into that variable's midpoint list
  double position;
};

/// A boundary move: either one new cut on X and one on Y, or one new cut on
/// every numeric conditioning variable.
struct Move {
  enum class Kind { xy, cond };

  Kind kind = Kind::xy;
  std::size_t x_index = 0;  // into midpoints(x)
  std::size_t y_index = 0;  // into midpoints(y)
  double x = 0;
  double y = 0;
  std::vector<CondCut> cond;
  /// Prior mass of this placement, normalized over the candidate pool.
  double weight = 0;

  void apply_to(BoundarySet& b) const;
};

struct TraceRecord {
  std::size_t t;
  /// Weighted average over candidate moves of the posterior dependence.
  double p;
  Move move;
  /// Weighted dependence of the committed move.
  double q_max;
  /// Posterior of independence of the committed grid.
  double posterior_independence;
  std::size_t n_candidates;
  BoundarySet boundaries;
  std::vector<std::size_t> resolution;
};

struct IndependenceResult {
  double posterior_independence = 1.0;  // 1 - p_max
  double p_max = 0.0;
  std::size_t t_star = 0;  // 0 when no iteration beat p_max = 0
  BoundarySet boundaries;
  std::vector<TraceRecord> trace;
  bool independent = true;
  AxisVars vars;
};

/// Candidate moves on top of `b`, with weights normalized to sum to 1 over
/// the returned list. XY moves come first in (x index, y index) order, then
/// conditioning tuples in lexicographic index order.
std::vector<Move> candidate_moves(const Dataset& data, const AxisVars& vars, const BoundarySet& b,
                                  const TestConfig& cfg);

/// Iteration cap actually used for a dataset.
std::size_t effective_max_iterations(const Dataset& data, const AxisVars& vars,
                                     const TestConfig& cfg);

/// Stopping rule: the sample standard deviation of the last `window` values
/// of p(t) is below the threshold, the iteration cap is reached, or no
/// candidate moves remain.
bool should_stop(std::span<const double> p_history, const TestConfig& cfg,
                 std::size_t max_iterations, bool candidates_remaining = true);

/// Greedy coarse-to-fine boundary search. Each iteration scores every
/// candidate move by its posterior dependence times its placement weight,
/// commits the best one, and records the weighted sum p(t). Returns
/// 1 - max_t p(t) as the posterior probability of independence.
IndependenceResult multires_test(const Dataset& data, const AxisVars& vars, const TestConfig& cfg);

}  // namespace bmit
