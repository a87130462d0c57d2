#include "bmit/multires.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include "bmit/bayes.hpp"
#include "parallel.hpp"

namespace bmit {

void TestConfig::validate() const {
  if (!(prior_independence > 0 && prior_independence < 1)) {
    throw std::invalid_argument("prior of independence must lie in (0,1)");
  }
  if (!(hyper > 0) || !std::isfinite(hyper)) {
    throw std::invalid_argument("hyperparameter must be finite and positive");
  }
  if (window < 2) throw std::invalid_argument("window must be at least 2");
  if (!(std_threshold >= 0)) throw std::invalid_argument("std threshold must be nonnegative");
  if (max_iterations && *max_iterations < 1) {
    throw std::invalid_argument("max iterations must be at least 1");
  }
}

void Move::apply_to(BoundarySet& b) const {
  if (kind == Kind::xy) {
    b.insert(0, x);
    b.insert(1, y);
  } else {
    for (const auto& c : cond) b.insert(c.axis, c.position);
  }
}

namespace {

constexpr std::size_t kDefaultIterationCap = 63;

/// Unused midpoints of one numeric axis, in position order, grouped by the
/// bin of the current grid they fall in.
struct AxisCandidates {
  std::vector<std::size_t> index;
  std::vector<double> position;
  std::vector<double> frac;  // gap / span
  std::vector<std::size_t> bin_start;  // candidates of bin k: [bin_start[k], bin_start[k+1])
  double frac_sum = 0;

  std::size_t size() const { return position.size(); }
};

AxisCandidates axis_candidates(const Column& col, const std::vector<double>& cuts) {
  AxisCandidates out;
  const auto mids = midpoints(col);
  const double width = span(col).width();
  out.bin_start.assign(cuts.size() + 2, 0);
  for (std::size_t m = 0; m < mids.size(); ++m) {
    if (std::binary_search(cuts.begin(), cuts.end(), mids[m].position)) continue;
    out.index.push_back(m);
    out.position.push_back(mids[m].position);
    out.frac.push_back(mids[m].gap / width);
    out.frac_sum += out.frac.back();
    ++out.bin_start[bin_of(cuts, mids[m].position) + 1];
  }
  for (std::size_t k = 1; k < out.bin_start.size(); ++k) out.bin_start[k] += out.bin_start[k - 1];
  return out;
}

struct CondTuple {
  std::vector<CondCut> cuts;
  double raw_weight;
};

/// The highest-weight tuples (one unused midpoint per numeric conditioning
/// axis), up to `cap`, returned in lexicographic midpoint-index order.
std::vector<CondTuple> cond_tuples(const Dataset& data, const AxisVars& vars, const BoundarySet& b,
                                   std::size_t cap) {
  struct AxisPool {
    std::size_t axis;
    AxisCandidates cand;
    std::vector<std::size_t> by_weight;  // candidate ids, heaviest first
  };
  std::vector<AxisPool> pools;
  for (std::size_t a = 2; a < vars.n_axes(); ++a) {
    const Column& col = data.column(vars.name(a));
    if (!col.kind.numeric()) continue;
    if (distinct_sorted(col).size() < 2) return {};
    AxisPool p{a, axis_candidates(col, b.axis(a)), {}};
    if (p.cand.size() == 0) return {};
    p.by_weight.resize(p.cand.size());
    for (std::size_t i = 0; i < p.by_weight.size(); ++i) p.by_weight[i] = i;
    std::stable_sort(p.by_weight.begin(), p.by_weight.end(),
                     [&](std::size_t l, std::size_t r) { return p.cand.frac[l] > p.cand.frac[r]; });
    pools.push_back(std::move(p));
  }
  if (pools.empty() || cap == 0) return {};

  using Ranks = std::vector<std::size_t>;
  auto weight_of = [&](const Ranks& r) {
    double w = 1.0;
    for (std::size_t k = 0; k < pools.size(); ++k) w *= pools[k].cand.frac[pools[k].by_weight[r[k]]];
    return w;
  };
  // Best-first walk over the rank lattice: the k heaviest products of
  // per-axis sorted weight lists.
  using Entry = std::pair<double, Ranks>;
  auto heavier = [](const Entry& l, const Entry& r) {
    if (l.first != r.first) return l.first < r.first;
    return l.second > r.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(heavier)> frontier(heavier);
  std::set<Ranks> seen;
  Ranks start(pools.size(), 0);
  frontier.emplace(weight_of(start), start);
  seen.insert(start);

  std::vector<CondTuple> out;
  while (!frontier.empty() && out.size() < cap) {
    auto [w, ranks] = frontier.top();
    frontier.pop();
    CondTuple tuple{{}, w};
    for (std::size_t k = 0; k < pools.size(); ++k) {
      const auto id = pools[k].by_weight[ranks[k]];
      tuple.cuts.push_back({pools[k].axis, pools[k].cand.index[id], pools[k].cand.position[id]});
    }
    out.push_back(std::move(tuple));
    for (std::size_t k = 0; k < pools.size(); ++k) {
      if (ranks[k] + 1 >= pools[k].by_weight.size()) continue;
      Ranks next = ranks;
      ++next[k];
      if (seen.insert(next).second) frontier.emplace(weight_of(next), next);
    }
  }
  std::sort(out.begin(), out.end(), [](const CondTuple& l, const CondTuple& r) {
    return std::lexicographical_compare(
        l.cuts.begin(), l.cuts.end(), r.cuts.begin(), r.cuts.end(),
        [](const CondCut& a, const CondCut& b) { return a.index < b.index; });
  });
  return out;
}

struct CandidatePool {
  AxisCandidates x;
  AxisCandidates y;
  std::vector<CondTuple> tuples;
  double total_weight = 0;

  std::size_t n_xy() const { return x.size() * y.size(); }
  std::size_t size() const { return n_xy() + tuples.size(); }
  double xy_weight(std::size_t gx, std::size_t gy) const {
    return (x.frac[gx] * y.frac[gy]) / total_weight;
  }
  double tuple_weight(std::size_t k) const { return tuples[k].raw_weight / total_weight; }
};

CandidatePool build_pool(const Dataset& data, const AxisVars& vars, const BoundarySet& b,
                         const TestConfig& cfg) {
  CandidatePool pool;
  pool.x = axis_candidates(data.column(vars.x), b.x);
  pool.y = axis_candidates(data.column(vars.y), b.y);
  pool.tuples = cond_tuples(data, vars, b, cfg.cond_candidate_cap);
  double total = pool.n_xy() ? pool.x.frac_sum * pool.y.frac_sum : 0.0;
  for (const auto& t : pool.tuples) total += t.raw_weight;
  pool.total_weight = total;
  return pool;
}

Move xy_move(const CandidatePool& pool, std::size_t gx, std::size_t gy) {
  Move m;
  m.kind = Move::Kind::xy;
  m.x_index = pool.x.index[gx];
  m.y_index = pool.y.index[gy];
  m.x = pool.x.position[gx];
  m.y = pool.y.position[gy];
  m.weight = pool.xy_weight(gx, gy);
  return m;
}

Move cond_move(const CandidatePool& pool, std::size_t k) {
  Move m;
  m.kind = Move::Kind::cond;
  m.cond = pool.tuples[k].cuts;
  m.weight = pool.tuple_weight(k);
  return m;
}

void check_vars(const Dataset& data, const AxisVars& vars) {
  std::set<std::string> names{vars.x};
  if (!names.insert(vars.y).second) {
    throw std::invalid_argument("x and y must be different variables");
  }
  for (const auto& c : vars.cond) {
    if (!names.insert(c).second) {
      throw std::invalid_argument("conditioning variable '" + c + "' repeats another variable");
    }
  }
  for (const auto& n : names) {
    if (!data.has_column(n)) throw DataError("no column named '" + n + "'");
  }
  for (const auto* n : {&vars.x, &vars.y}) {
    const Column& col = data.column(*n);
    if (!col.kind.numeric()) {
      throw DataError("column '" + col.name + "' must be continuous or ordinal");
    }
    midpoints(col);  // throws on fewer than two distinct values
  }
}

/// Scores all XY moves on top of the committed grid `base` with the log
/// dependence ratio updated incrementally from the parent counts:
/// splitting X-bin a and Y-bin b changes only row a, column b, and the
/// four-way split of cell (a, b), in every conditioning slice.
class XYEvaluator {
 public:
  struct RowResult {
    double sum = 0;
    double best = -1;
    std::size_t best_y = 0;
  };

  XYEvaluator(const Dataset& data, const AxisVars& vars, const ContingencyTable& base,
              const CandidatePool& pool, const TestConfig& cfg, std::span<const double> lg_table)
      : pool_(pool), base_(base), f_(lg_table), prior_(prior_log_odds(cfg.prior_independence)) {
    I_ = base.rows();
    J_ = base.cols();
    S_ = base.n_slices();
    const std::size_t n = data.n_rows();
    const std::size_t n_axes = base.dims().size();
    const auto bins = base.point_bins();
    const auto& xs = data.column(vars.x).values;
    const auto& ys = data.column(vars.y).values;
    const std::size_t mx = pool.x.size(), my = pool.y.size();

    // Per-point placement relative to the candidate lists.
    std::vector<std::size_t> slice(n), gx(n), gy(n);
    std::vector<bool> gy_valid(n);
    for (std::size_t r = 0; r < n; ++r) {
      const std::uint32_t* pb = bins.data() + r * n_axes;
      std::size_t s = 0;
      for (std::size_t a = 2; a < n_axes; ++a) s = s * base.dims()[a] + pb[a];
      slice[r] = s;
      gx[r] = static_cast<std::size_t>(
          std::lower_bound(pool.x.position.begin(), pool.x.position.end(), xs[r]) -
          pool.x.position.begin());
      gy[r] = static_cast<std::size_t>(
          std::lower_bound(pool.y.position.begin(), pool.y.position.end(), ys[r]) -
          pool.y.position.begin());
      gy_valid[r] = gy[r] < pool.y.bin_start[pb[1] + 1];
    }

    // Points of each X-bin ordered by their first candidate at or above.
    points_.resize(I_);
    for (std::size_t r = 0; r < n; ++r) {
      const std::uint32_t* pb = bins.data() + r * n_axes;
      points_[pb[0]].push_back({gx[r], pb[1], slice[r], gy_valid[r] ? gy[r] : kNone});
    }
    for (auto& v : points_) {
      std::stable_sort(v.begin(), v.end(), [](const Point& l, const Point& r) { return l.gx < r.gx; });
    }

    // below_[(gy * I + i) * S + s]: points of cell (i, bin(gy), s) at or
    // below candidate gy.
    below_.assign(my * I_ * S_, 0);
    for (std::size_t r = 0; r < n; ++r) {
      if (!gy_valid[r]) continue;
      const std::uint32_t* pb = bins.data() + r * n_axes;
      ++below_[(gy[r] * I_ + pb[0]) * S_ + slice[r]];
    }
    y_bin_.resize(my);
    for (std::size_t b = 0; b < J_; ++b) {
      for (std::size_t g = pool.y.bin_start[b]; g < pool.y.bin_start[b + 1]; ++g) {
        y_bin_[g] = b;
        if (g > pool.y.bin_start[b]) {
          for (std::size_t k = 0; k < I_ * S_; ++k) below_[g * I_ * S_ + k] += below_[(g - 1) * I_ * S_ + k];
        }
      }
    }
    x_bin_.resize(mx);
    for (std::size_t a = 0; a < I_; ++a) {
      for (std::size_t g = pool.x.bin_start[a]; g < pool.x.bin_start[a + 1]; ++g) x_bin_[g] = a;
    }

    // Column-side terms per Y candidate and slice.
    col_term_.assign(my * S_, 0.0);
    for (std::size_t g = 0; g < my; ++g) {
      const std::size_t b = y_bin_[g];
      for (std::size_t s = 0; s < S_; ++s) {
        double joint = 0;
        std::int64_t below_total = 0;
        for (std::size_t i = 0; i < I_; ++i) {
          const auto d = below_[(g * I_ + i) * S_ + s];
          below_total += d;
          joint += split2(cell(i, b, s), d);
        }
        col_term_[g * S_ + s] = joint - split2(base.slice(s).col_totals[b], below_total);
      }
    }

    // Per-slice log ratio of the unsplit counts under the enlarged grid's
    // normalizing constants.
    const double h = cfg.hyper;
    const double K = static_cast<double>((I_ + 1) * (J_ + 1));
    const double rows = static_cast<double>(I_ + 1), cols = static_cast<double>(J_ + 1);
    base_ratio_.resize(S_);
    for (std::size_t s = 0; s < S_; ++s) {
      const auto sl = base.slice(s);
      const double n_s = static_cast<double>(sl.total);
      double joint = 0, row = 0, col = 0;
      for (auto c : sl.cells) joint += fc(c);
      for (auto c : sl.row_totals) row += fc(c);
      for (auto c : sl.col_totals) col += fc(c);
      joint += log_gamma(h * K) - log_gamma(h * K + n_s);
      row += log_gamma(h * rows) - log_gamma(h * rows + n_s);
      col += log_gamma(h * cols) - log_gamma(h * cols + n_s);
      base_ratio_[s] = joint - row - col;
    }
  }

  /// Scores every Y candidate against X candidate `gx`. `scratch` must hold
  /// at least scratch_size() values and is overwritten.
  RowResult row(std::size_t gx, std::span<std::int64_t> scratch) const {
    const std::size_t a = x_bin_[gx];
    const std::size_t my = pool_.y.size();
    std::span<std::int64_t> left = scratch.subspan(0, J_ * S_);      // (j, s) at or left of x
    std::span<std::int64_t> hist = scratch.subspan(J_ * S_, my * S_);  // (gy, s) left of x
    std::span<std::int64_t> running = scratch.subspan(J_ * S_ + my * S_, S_);
    std::fill(left.begin(), left.end(), 0);
    std::fill(hist.begin(), hist.end(), 0);
    for (const Point& p : points_[a]) {
      if (p.gx > gx) break;
      ++left[p.y_bin * S_ + p.slice];
      if (p.gy != kNone) ++hist[p.gy * S_ + p.slice];
    }

    std::vector<double> row_term(S_);
    for (std::size_t s = 0; s < S_; ++s) {
      double joint = 0;
      std::int64_t left_total = 0;
      for (std::size_t j = 0; j < J_; ++j) {
        const auto l = left[j * S_ + s];
        left_total += l;
        joint += split2(cell(a, j, s), l);
      }
      row_term[s] = base_ratio_[s] + joint - split2(base_.slice(s).row_totals[a], left_total);
    }

    RowResult out;
    std::vector<double> cell_term(S_);
    for (std::size_t b = 0; b < J_; ++b) {
      const std::size_t y_begin = pool_.y.bin_start[b], y_end = pool_.y.bin_start[b + 1];
      if (y_begin == y_end) continue;
      for (std::size_t s = 0; s < S_; ++s) {
        running[s] = 0;
        cell_term[s] = row_term[s] - split2(cell(a, b, s), left[b * S_ + s]);
      }
      for (std::size_t gy = y_begin; gy < y_end; ++gy) {
        double posterior = 1.0;
        for (std::size_t s = 0; s < S_; ++s) {
          running[s] += hist[gy * S_ + s];
          const auto c = cell(a, b, s);
          const auto l = left[b * S_ + s];
          const auto d = below_[(gy * I_ + a) * S_ + s];
          const auto ll = running[s];
          const double four = fc(ll) + fc(l - ll) + fc(d - ll) + fc(c - l - d + ll) - fc(c);
          const double log_ratio = cell_term[s] + col_term_[gy * S_ + s] - split2(c, d) + four;
          posterior *= posterior_from_log_odds(log_ratio, prior_);
        }
        const double p = (1.0 - posterior) * pool_.xy_weight(gx, gy);
        out.sum += p;
        if (p > out.best) {
          out.best = p;
          out.best_y = gy;
        }
      }
    }
    return out;
  }

  std::size_t scratch_size() const { return J_ * S_ + pool_.y.size() * S_ + S_; }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  struct Point {
    std::size_t gx;
    std::size_t y_bin;
    std::size_t slice;
    std::size_t gy;  // kNone when above every candidate of its Y-bin
  };

  double fc(std::int64_t c) const { return f_[static_cast<std::size_t>(c)]; }
  /// Change in Σ f when a count c splits into (part, c - part).
  double split2(std::int64_t c, std::int64_t part) const { return fc(part) + fc(c - part) - fc(c); }
  std::int64_t cell(std::size_t i, std::size_t j, std::size_t s) const {
    return base_.cells()[(s * I_ + i) * J_ + j];
  }

  const CandidatePool& pool_;
  const ContingencyTable& base_;
  std::span<const double> f_;
  double prior_;
  std::size_t I_ = 0, J_ = 0, S_ = 0;
  std::vector<std::vector<Point>> points_;
  std::vector<std::int64_t> below_;
  std::vector<std::size_t> x_bin_, y_bin_;
  std::vector<double> col_term_;
  std::vector<double> base_ratio_;
};

ContingencyTable commit(const ContingencyTable& base, const Dataset& data, const AxisVars& vars,
                        const Move& move) {
  if (move.kind == Move::Kind::xy) {
    return split_axis(split_axis(base, data, vars, 0, move.x), data, vars, 1, move.y);
  }
  ContingencyTable t = base;
  for (const auto& c : move.cond) t = split_axis(t, data, vars, c.axis, c.position);
  return t;
}

}  // namespace

std::vector<Move> candidate_moves(const Dataset& data, const AxisVars& vars, const BoundarySet& b,
                                  const TestConfig& cfg) {
  check_vars(data, vars);
  validate_boundaries(data, vars, b);
  const auto pool = build_pool(data, vars, b, cfg);
  std::vector<Move> out;
  out.reserve(pool.size());
  for (std::size_t gx = 0; gx < pool.x.size(); ++gx) {
    for (std::size_t gy = 0; gy < pool.y.size(); ++gy) out.push_back(xy_move(pool, gx, gy));
  }
  for (std::size_t k = 0; k < pool.tuples.size(); ++k) out.push_back(cond_move(pool, k));
  return out;
}

std::size_t effective_max_iterations(const Dataset& data, const AxisVars& vars,
                                     const TestConfig& cfg) {
  if (cfg.max_iterations) return *cfg.max_iterations;
  const auto mx = midpoints(data.column(vars.x)).size();
  const auto my = midpoints(data.column(vars.y)).size();
  return std::min({kDefaultIterationCap, mx, my});
}

bool should_stop(std::span<const double> p_history, const TestConfig& cfg,
                 std::size_t max_iterations, bool candidates_remaining) {
  if (!candidates_remaining) return true;
  if (p_history.size() >= max_iterations) return true;
  if (p_history.size() < cfg.window) return false;
  const auto tail = p_history.last(cfg.window);
  double mean = 0;
  for (double v : tail) mean += v;
  mean /= static_cast<double>(tail.size());
  double ss = 0;
  for (double v : tail) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(tail.size() - 1));
  return sd < cfg.std_threshold;
}

IndependenceResult multires_test(const Dataset& data, const AxisVars& vars, const TestConfig& cfg) {
  cfg.validate();
  check_vars(data, vars);
  const std::size_t cap = effective_max_iterations(data, vars, cfg);

  std::vector<double> lg(data.n_rows() + 1);
  const double lg_h = log_gamma(cfg.hyper);
  for (std::size_t c = 0; c < lg.size(); ++c) lg[c] = log_gamma(cfg.hyper + static_cast<double>(c)) - lg_h;

  IndependenceResult result;
  result.vars = vars;
  BoundarySet committed = BoundarySet::empty(vars.cond.size());
  ContingencyTable table = count_cells(data, vars, committed);
  std::vector<double> p_history;

  for (std::size_t t = 1;; ++t) {
    const auto pool = build_pool(data, vars, committed, cfg);
    if (pool.size() == 0) {
      if (t == 1) throw DataError("no candidate boundary moves available");
      break;
    }

    double p_t = 0;
    double q_max = -1;
    Move best;

    if (pool.n_xy() > 0) {
      const XYEvaluator eval(data, vars, table, pool, cfg, lg);
      const std::size_t mx = pool.x.size();
      std::vector<XYEvaluator::RowResult> rows(mx);
      const std::size_t workers = detail::resolve_threads(cfg.threads);
      std::vector<std::vector<std::int64_t>> scratch(workers,
                                                     std::vector<std::int64_t>(eval.scratch_size()));
      detail::parallel_chunks(mx, workers, 4, [&](std::size_t id, std::size_t begin, std::size_t end) {
        for (std::size_t gx = begin; gx < end; ++gx) rows[gx] = eval.row(gx, scratch[id]);
      });
      for (std::size_t gx = 0; gx < mx; ++gx) {
        p_t += rows[gx].sum;
        if (rows[gx].best > q_max) {
          q_max = rows[gx].best;
          best = xy_move(pool, gx, rows[gx].best_y);
        }
      }
    }

    for (std::size_t k = 0; k < pool.tuples.size(); ++k) {
      Move m = cond_move(pool, k);
      const auto t_next = commit(table, data, vars, m);
      const auto prior = DirichletPrior::uniform(t_next.rows(), t_next.cols(), cfg.hyper);
      const double p =
          (1.0 - posterior_conditional_fixed(t_next, prior, cfg.prior_independence)) * m.weight;
      if (cfg.cond_in_pt) p_t += p;
      if (p > q_max) {
        q_max = p;
        best = std::move(m);
      }
    }

    best.apply_to(committed);
    table = commit(table, data, vars, best);
    const auto prior = DirichletPrior::uniform(table.rows(), table.cols(), cfg.hyper);

    TraceRecord rec{t,
                    p_t,
                    best,
                    q_max,
                    posterior_conditional_fixed(table, prior, cfg.prior_independence),
                    pool.size(),
                    committed,
                    table.dims()};
    result.trace.push_back(std::move(rec));
    p_history.push_back(p_t);
    if (p_t > result.p_max) {
      result.p_max = p_t;
      result.t_star = t;
    }
    if (should_stop(p_history, cfg, cap)) break;
  }

  // w' sums to 1 only up to rounding, so p_max can overshoot by an ulp or two.
  result.posterior_independence = std::clamp(1.0 - result.p_max, 0.0, 1.0);
  result.boundaries = result.t_star ? result.trace[result.t_star - 1].boundaries
                                    : BoundarySet::empty(vars.cond.size());
  result.independent = result.posterior_independence > cfg.prior_independence;
  return result;
}

}  // namespace bmit
