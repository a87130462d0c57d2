#include <gtest/gtest.h>

#include <random>

#include "bmit/discretize.hpp"

using namespace bmit;

namespace {

// Brute-force cell counts: bin = number of cuts strictly below the value.
std::vector<std::int64_t> naive_counts(const Dataset& d, const AxisVars& vars, const BoundarySet& b) {
  std::vector<std::size_t> dims;
  for (std::size_t a = 0; a < vars.n_axes(); ++a) {
    const auto& col = d.column(vars.name(a));
    dims.push_back(col.kind.numeric() ? b.axis(a).size() + 1 : col.kind.levels.size());
  }
  std::size_t total = 1;
  for (auto n : dims) total *= n;
  std::vector<std::int64_t> cells(total, 0);
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    std::vector<std::size_t> bin(dims.size());
    for (std::size_t a = 0; a < dims.size(); ++a) {
      const auto& col = d.column(vars.name(a));
      const double v = col.values[r];
      if (!col.kind.numeric()) {
        bin[a] = static_cast<std::size_t>(v);
        continue;
      }
      for (double c : b.axis(a)) bin[a] += c < v ? 1 : 0;
    }
    std::size_t slice = 0;
    for (std::size_t a = 2; a < dims.size(); ++a) slice = slice * dims[a] + bin[a];
    ++cells[(slice * dims[0] + bin[0]) * dims[1] + bin[1]];
  }
  return cells;
}

Dataset random_dataset(std::mt19937_64& rng, std::size_t n, bool with_cat) {
  std::uniform_int_distribution<int> small(0, 9);
  std::normal_distribution<double> g;
  std::vector<double> x(n), y(n), z(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = small(rng);  // many ties
    y[i] = g(rng);
    z[i] = std::round(g(rng) * 3);
    c[i] = small(rng) % 3;
  }
  std::vector<Column> cols{{"x", ColumnKind::continuous(), x},
                           {"y", ColumnKind::continuous(), y},
                           {"z", ColumnKind::ordinal(), z}};
  if (with_cat) cols.push_back({"c", ColumnKind::categorical({"a", "b", "c"}), c});
  return Dataset(std::move(cols));
}

std::vector<double> all_midpoints(const Column& col) {
  std::vector<double> out;
  for (const auto& m : midpoints(col)) out.push_back(m.position);
  return out;
}

}  // namespace

TEST(CountCells, SmallExample) {
  const Dataset d({{"x", ColumnKind::continuous(), {0, 0, 1, 1, 2}},
                   {"y", ColumnKind::continuous(), {0, 1, 0, 1, 1}}});
  const AxisVars vars{"x", "y", {}};
  BoundarySet b = BoundarySet::empty(0);
  b.insert(0, 0.5);
  b.insert(1, 0.5);
  const auto t = count_cells(d, vars, b);
  ASSERT_EQ(t.dims(), (std::vector<std::size_t>{2, 2}));
  EXPECT_EQ(t.at(0, 0), 1);
  EXPECT_EQ(t.at(0, 1), 1);
  EXPECT_EQ(t.at(1, 0), 1);
  EXPECT_EQ(t.at(1, 1), 2);
  const auto s = t.slice(0);
  EXPECT_EQ(s.row_totals[1], 3);
  EXPECT_EQ(s.col_totals[0], 2);
  EXPECT_EQ(t.total(), 5);
}

TEST(CountCells, ValueOnCutBinsLow) {
  EXPECT_EQ(bin_of({1.0, 2.0}, 1.0), 0u);
  EXPECT_EQ(bin_of({1.0, 2.0}, 1.5), 1u);
  EXPECT_EQ(bin_of({1.0, 2.0}, 2.5), 2u);
}

TEST(CountCells, CategoricalAxisUsesLevels) {
  std::mt19937_64 rng(3);
  const auto d = random_dataset(rng, 60, true);
  const AxisVars vars{"x", "y", {"c"}};
  const auto t = count_cells(d, vars, BoundarySet::empty(1));
  EXPECT_EQ(t.n_slices(), 3u);
  EXPECT_EQ(std::vector<std::int64_t>(t.cells().begin(), t.cells().end()),
            naive_counts(d, vars, BoundarySet::empty(1)));
  BoundarySet bad = BoundarySet::empty(1);
  bad.cond[0] = {0.5};
  EXPECT_THROW(count_cells(d, vars, bad), std::invalid_argument);
}

TEST(CountCells, RejectsInvalidBoundaries) {
  const Dataset d({{"x", ColumnKind::continuous(), {0, 1, 2}}, {"y", ColumnKind::continuous(), {0, 1, 2}}});
  const AxisVars vars{"x", "y", {}};
  BoundarySet b = BoundarySet::empty(0);
  b.x = {2.0};
  EXPECT_THROW(count_cells(d, vars, b), std::invalid_argument);
  b.x = {1.5, 0.5};
  EXPECT_THROW(count_cells(d, vars, b), std::invalid_argument);
  b.x = {0.5, 1.5};
  EXPECT_THROW(b.insert(0, 1.5), std::invalid_argument);
}

// Incremental splitting must agree with a full recount for every axis.
TEST(SplitAxis, MatchesRecountOnRandomData) {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 100; ++rep) {
    const bool with_cat = rep % 2 == 0;
    const auto d = random_dataset(rng, 20 + rep, with_cat);
    AxisVars vars{"x", "y", {"z"}};
    if (with_cat) vars.cond.push_back("c");
    BoundarySet b = BoundarySet::empty(vars.cond.size());
    auto t = count_cells(d, vars, b);
    for (int step = 0; step < 6; ++step) {
      const std::size_t axis = static_cast<std::size_t>(step % 3);
      std::vector<double> unused;
      for (double m : all_midpoints(d.column(vars.name(axis)))) {
        if (!b.contains(axis, m)) unused.push_back(m);
      }
      if (unused.empty()) continue;
      const double pos = unused[std::uniform_int_distribution<std::size_t>(0, unused.size() - 1)(rng)];
      t = split_axis(t, d, vars, axis, pos);
      b.insert(axis, pos);
      const auto full = count_cells(d, vars, b);
      ASSERT_EQ(t, full) << "rep " << rep << " step " << step;
      ASSERT_EQ(std::vector<std::int64_t>(t.cells().begin(), t.cells().end()), naive_counts(d, vars, b));
    }
  }
}

TEST(SplitAxis, RejectsDuplicateAndOutOfSpan) {
  const Dataset d({{"x", ColumnKind::continuous(), {0, 1, 2}}, {"y", ColumnKind::continuous(), {0, 1, 2}}});
  const AxisVars vars{"x", "y", {}};
  const auto t = split_axis(count_cells(d, vars, BoundarySet::empty(0)), d, vars, 0, 0.5);
  EXPECT_THROW(split_axis(t, d, vars, 0, 0.5), std::invalid_argument);
  EXPECT_THROW(split_axis(t, d, vars, 1, 5.0), std::invalid_argument);
}

TEST(PairWeight, Examples) {
  // x in {0,1,4}, y in {0,1}: two candidates with weights 1/4 and 3/4.
  EXPECT_DOUBLE_EQ(pair_weight(1, 1, 4, 1), 0.25);
  EXPECT_DOUBLE_EQ(pair_weight(3, 1, 4, 1), 0.75);
  EXPECT_THROW(pair_weight(1, 1, 0, 1), DataError);
}

TEST(PairWeight, FullGridSumsToOne) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x(30), y(30);
    for (auto& v : x) v = g(rng);
    for (auto& v : y) v = std::exp(g(rng));
    const Column cx{"x", ColumnKind::continuous(), x};
    const Column cy{"y", ColumnKind::continuous(), y};
    double sum = 0;
    for (const auto& mx : midpoints(cx)) {
      for (const auto& my : midpoints(cy)) sum += pair_weight(mx.gap, my.gap, span(cx).width(), span(cy).width());
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}
