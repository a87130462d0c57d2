#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "bmit/bayes.hpp"
#include "bmit/multires.hpp"
#include "bmit/synth.hpp"

using namespace bmit;

namespace {

double exact_posterior(const Dataset& d, const AxisVars& vars, const BoundarySet& b, const TestConfig& cfg) {
  const auto t = count_cells(d, vars, b);
  return posterior_conditional_fixed(t, DirichletPrior::uniform(t.rows(), t.cols(), cfg.hyper),
                                     cfg.prior_independence);
}

// p(t) and the best move's score by recounting every candidate from scratch.
std::pair<double, double> brute_force_step(const Dataset& d, const AxisVars& vars, const BoundarySet& b,
                                           const TestConfig& cfg) {
  double sum = 0, best = -1;
  for (const auto& m : candidate_moves(d, vars, b, cfg)) {
    BoundarySet next = b;
    m.apply_to(next);
    const double p = (1.0 - exact_posterior(d, vars, next, cfg)) * m.weight;
    if (m.kind == Move::Kind::xy || cfg.cond_in_pt) sum += p;
    best = std::max(best, p);
  }
  return {sum, best};
}

Dataset mixed_dataset(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> x(n), y(n), z(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = std::round(g(rng) * 2);
    x[i] = z[i] + g(rng);
    y[i] = std::round((z[i] + g(rng)) * 4) / 4;  // ties on y
    c[i] = static_cast<double>(rng() % 2);
  }
  return Dataset({{"x", ColumnKind::continuous(), x},
                  {"y", ColumnKind::continuous(), y},
                  {"z", ColumnKind::ordinal(), z},
                  {"c", ColumnKind::categorical({"u", "v"}), c}});
}

Dataset synth(Family f, std::uint64_t seed, std::size_t n = 1000) { return generate({f, n, seed, 0.1}); }

}  // namespace

TEST(CandidateMoves, WeightsFromGaps) {
  const Dataset d({{"x", ColumnKind::continuous(), {0, 1, 4}}, {"y", ColumnKind::continuous(), {0, 1, 1}}});
  const AxisVars vars{"x", "y", {}};
  const auto moves = candidate_moves(d, vars, BoundarySet::empty(0), TestConfig{});
  ASSERT_EQ(moves.size(), 2u);
  EXPECT_EQ(moves[0].x, 0.5);
  EXPECT_EQ(moves[1].x, 2.5);
  EXPECT_DOUBLE_EQ(moves[0].weight, 0.25);
  EXPECT_DOUBLE_EQ(moves[1].weight, 0.75);

  BoundarySet used = BoundarySet::empty(0);
  used.x = {0.5, 2.5};
  used.y = {0.5};
  EXPECT_TRUE(candidate_moves(d, vars, used, TestConfig{}).empty());
}

TEST(CandidateMoves, WeightsSumToOne) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto d = mixed_dataset(seed, 40);
    for (const AxisVars& vars : {AxisVars{"x", "y", {}}, AxisVars{"x", "y", {"z", "c"}}}) {
      BoundarySet b = BoundarySet::empty(vars.cond.size());
      b.x = {0.0};
      double sum = 0;
      for (const auto& m : candidate_moves(d, vars, b, TestConfig{})) {
        EXPECT_GT(m.weight, 0);
        EXPECT_LE(m.weight, 1);
        sum += m.weight;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(CandidateMoves, ConditioningCapKeepsHeaviest) {
  const auto d = mixed_dataset(3, 200);
  const AxisVars vars{"x", "y", {"z"}};
  TestConfig cfg;
  cfg.cond_candidate_cap = 2;
  std::vector<double> cond_w;
  for (const auto& m : candidate_moves(d, vars, BoundarySet::empty(1), cfg)) {
    if (m.kind == Move::Kind::cond) cond_w.push_back(m.weight);
  }
  ASSERT_EQ(cond_w.size(), 2u);
  cfg.cond_candidate_cap = 1000;
  std::vector<double> all_w;
  for (const auto& m : candidate_moves(d, vars, BoundarySet::empty(1), cfg)) {
    if (m.kind == Move::Kind::cond) all_w.push_back(m.weight);
  }
  std::sort(all_w.rbegin(), all_w.rend());
  std::sort(cond_w.rbegin(), cond_w.rend());
  // Weights are renormalized over different pools, so compare ratios.
  EXPECT_NEAR(cond_w[0] / cond_w[1], all_w[0] / all_w[1], 1e-12);
}

TEST(ShouldStop, Examples) {
  TestConfig cfg;
  const std::vector<double> flat{0.40, 0.40005, 0.40002};
  EXPECT_TRUE(should_stop(flat, cfg, 63));
  const std::vector<double> short_run{0.1, 0.5};
  EXPECT_FALSE(should_stop(short_run, cfg, 63));
  EXPECT_TRUE(should_stop(short_run, cfg, 2));
  const std::vector<double> moving{0.1, 0.5, 0.3};
  EXPECT_FALSE(should_stop(moving, cfg, 63));
  EXPECT_TRUE(should_stop(moving, cfg, 63, false));
}

TEST(Multires, FourPointExample) {
  const Dataset d({{"x", ColumnKind::continuous(), {0, 0, 1, 1}}, {"y", ColumnKind::continuous(), {0, 1, 0, 1}}});
  const auto r = multires_test(d, {"x", "y", {}}, TestConfig{});
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].move.weight, 1.0);
  EXPECT_NEAR(r.trace[0].p, 15.0 / 29.0, 1e-12);
  EXPECT_NEAR(r.posterior_independence, 14.0 / 29.0, 1e-12);
  EXPECT_EQ(r.t_star, 1u);
  EXPECT_FALSE(r.independent);
}

TEST(Multires, RejectsBadVariables) {
  const auto d = mixed_dataset(1, 30);
  EXPECT_THROW(multires_test(d, {"x", "x", {}}, TestConfig{}), std::invalid_argument);
  EXPECT_THROW(multires_test(d, {"x", "c", {}}, TestConfig{}), DataError);
  EXPECT_THROW(multires_test(d, {"x", "nope", {}}, TestConfig{}), DataError);
  const Dataset flat({{"x", ColumnKind::continuous(), {1, 2, 3}}, {"y", ColumnKind::continuous(), {5, 5, 5}}});
  EXPECT_THROW(multires_test(flat, {"x", "y", {}}, TestConfig{}), DataError);
  TestConfig bad;
  bad.prior_independence = 1.0;
  EXPECT_THROW(multires_test(d, {"x", "y", {}}, bad), std::invalid_argument);
}

TEST(Multires, MatchesBruteForceSearch) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto d = mixed_dataset(seed, 45);
    for (const AxisVars& vars : {AxisVars{"x", "y", {}}, AxisVars{"x", "y", {"z"}}, AxisVars{"x", "y", {"z", "c"}},
                                 AxisVars{"x", "y", {"c"}}}) {
      TestConfig cfg;
      cfg.std_threshold = 0;
      cfg.max_iterations = 5;
      cfg.cond_in_pt = seed % 2 == 0;
      const auto r = multires_test(d, vars, cfg);
      BoundarySet prev = BoundarySet::empty(vars.cond.size());
      for (const auto& rec : r.trace) {
        const auto [sum, best] = brute_force_step(d, vars, prev, cfg);
        EXPECT_NEAR(rec.p, sum, 1e-12) << "seed " << seed << " t " << rec.t;
        EXPECT_NEAR(rec.q_max, best, 1e-12);
        prev = rec.boundaries;
      }
    }
  }
}

TEST(Multires, TraceReplay) {
  const auto d = synth(Family::nonlinear_sine, 4, 400);
  const AxisVars vars{"x", "y", {}};
  const auto r = multires_test(d, vars, TestConfig{});
  ASSERT_FALSE(r.trace.empty());
  double p_max = 0;
  for (const auto& rec : r.trace) {
    const double post = exact_posterior(d, vars, rec.boundaries, TestConfig{});
    EXPECT_NEAR(rec.posterior_independence, post, 1e-12);
    EXPECT_NEAR(rec.q_max, (1.0 - post) * rec.move.weight, 1e-12);
    EXPECT_GE(rec.p, 0.0);
    EXPECT_LE(rec.p, 1.0 + 1e-12);
    p_max = std::max(p_max, rec.p);
  }
  EXPECT_EQ(r.p_max, p_max);
  EXPECT_EQ(r.boundaries, r.trace[r.t_star - 1].boundaries);
}

TEST(Multires, BoundariesNest) {
  const auto d = mixed_dataset(9, 120);
  const AxisVars vars{"x", "y", {"z"}};
  const auto r = multires_test(d, vars, TestConfig{});
  BoundarySet prev = BoundarySet::empty(1);
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    const auto& cur = r.trace[k].boundaries;
    EXPECT_EQ(r.trace[k].t, k + 1);
    std::size_t grew = 0;
    for (std::size_t a = 0; a < cur.n_axes(); ++a) {
      for (double c : prev.axis(a)) EXPECT_TRUE(cur.contains(a, c));
      grew += cur.axis(a).size() - prev.axis(a).size();
    }
    EXPECT_GT(grew, 0u);
    prev = cur;
  }
}

TEST(Multires, ThreadCountDoesNotChangeResults) {
  const auto d = mixed_dataset(5, 300);
  for (const AxisVars& vars : {AxisVars{"x", "y", {}}, AxisVars{"x", "y", {"z", "c"}}}) {
    TestConfig one, many;
    one.threads = 1;
    many.threads = 8;
    const auto a = multires_test(d, vars, one);
    const auto b = multires_test(d, vars, many);
    ASSERT_EQ(a.trace.size(), b.trace.size());
    EXPECT_EQ(a.posterior_independence, b.posterior_independence);
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
      EXPECT_EQ(a.trace[k].p, b.trace[k].p);
      EXPECT_EQ(a.trace[k].boundaries, b.trace[k].boundaries);
    }
  }
}

TEST(Multires, SyntheticDecisions) {
  const AxisVars vars{"x", "y", {}};
  EXPECT_TRUE(multires_test(synth(Family::independent_uniform, 1), vars, TestConfig{}).independent);
  EXPECT_FALSE(multires_test(synth(Family::nonlinear_sine, 1), vars, TestConfig{}).independent);
}

TEST(Multires, IterationCap) {
  TestConfig cfg;
  cfg.std_threshold = 0;
  cfg.max_iterations = 4;
  const auto r = multires_test(synth(Family::ring, 2, 300), {"x", "y", {}}, cfg);
  EXPECT_EQ(r.trace.size(), 4u);
  const Dataset small({{"x", ColumnKind::continuous(), {0, 1, 2, 3}}, {"y", ColumnKind::continuous(), {0, 1, 1, 0}}});
  EXPECT_EQ(effective_max_iterations(small, {"x", "y", {}}, TestConfig{}), 1u);
}

// Aggregating 2x2 blocks of a product distribution stays a product.
TEST(Factorization, CoarseningPreservesIndependence) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t m = std::size_t{1} << (rep % 3);
    const std::size_t n = 2 * m;
    std::vector<double> px(n), py(n);
    for (auto& v : px) v = u(rng);
    for (auto& v : py) v = u(rng);
    const double sx = std::accumulate(px.begin(), px.end(), 0.0);
    const double sy = std::accumulate(py.begin(), py.end(), 0.0);
    for (auto& v : px) v /= sx;
    for (auto& v : py) v /= sy;
    std::vector<double> coarse(m * m, 0.0), cx(m, 0.0), cy(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) coarse[(i / 2) * m + j / 2] += px[i] * py[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        cx[i] += coarse[i * m + j];
        cy[j] += coarse[i * m + j];
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) EXPECT_NEAR(coarse[i * m + j], cx[i] * cy[j], 1e-12);
    }
  }
}
