#include "bmit/discretize.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bmit {

const std::string& AxisVars::name(std::size_t axis) const {
  if (axis == 0) return x;
  if (axis == 1) return y;
  if (axis - 2 >= cond.size()) throw std::out_of_range("axis index out of range");
  return cond[axis - 2];
}

std::vector<double>& BoundarySet::axis(std::size_t a) {
  if (a == 0) return x;
  if (a == 1) return y;
  if (a - 2 >= cond.size()) throw std::out_of_range("axis index out of range");
  return cond[a - 2];
}

const std::vector<double>& BoundarySet::axis(std::size_t a) const {
  return const_cast<BoundarySet*>(this)->axis(a);
}

void BoundarySet::insert(std::size_t a, double position) {
  auto& cuts = axis(a);
  auto it = std::lower_bound(cuts.begin(), cuts.end(), position);
  if (it != cuts.end() && *it == position) {
    throw std::invalid_argument("boundary " + std::to_string(position) + " already present");
  }
  cuts.insert(it, position);
}

bool BoundarySet::contains(std::size_t a, double position) const {
  const auto& cuts = axis(a);
  return std::binary_search(cuts.begin(), cuts.end(), position);
}

std::size_t bin_of(const std::vector<double>& cuts, double value) {
  return static_cast<std::size_t>(std::lower_bound(cuts.begin(), cuts.end(), value) - cuts.begin());
}

ContingencyTable ContingencyTable::from_counts(std::size_t rows, std::size_t cols,
                                               std::vector<std::int64_t> counts,
                                               std::vector<std::size_t> slice_dims) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("table must have at least one cell");
  ContingencyTable t;
  t.dims_ = {rows, cols};
  t.n_slices_ = 1;
  for (auto d : slice_dims) {
    if (d == 0) throw std::invalid_argument("conditioning axis with zero bins");
    t.dims_.push_back(d);
    t.n_slices_ *= d;
  }
  if (counts.size() != rows * cols * t.n_slices_) {
    throw std::invalid_argument("count vector size does not match table dimensions");
  }
  if (std::any_of(counts.begin(), counts.end(), [](std::int64_t c) { return c < 0; })) {
    throw std::invalid_argument("negative cell count");
  }
  t.cells_ = std::move(counts);
  t.rebuild_marginals();
  return t;
}

void ContingencyTable::rebuild_marginals() {
  const std::size_t I = dims_[0], J = dims_[1];
  row_totals_.assign(n_slices_ * I, 0);
  col_totals_.assign(n_slices_ * J, 0);
  slice_totals_.assign(n_slices_, 0);
  total_ = 0;
  for (std::size_t s = 0; s < n_slices_; ++s) {
    const std::int64_t* base = cells_.data() + s * I * J;
    for (std::size_t i = 0; i < I; ++i) {
      for (std::size_t j = 0; j < J; ++j) {
        const auto c = base[i * J + j];
        row_totals_[s * I + i] += c;
        col_totals_[s * J + j] += c;
        slice_totals_[s] += c;
      }
    }
    total_ += slice_totals_[s];
  }
}

ContingencyTable::Slice ContingencyTable::slice(std::size_t s) const {
  if (s >= n_slices_) throw std::out_of_range("slice index out of range");
  const std::size_t I = dims_[0], J = dims_[1];
  return Slice{I,
               J,
               std::span<const std::int64_t>(cells_).subspan(s * I * J, I * J),
               std::span<const std::int64_t>(row_totals_).subspan(s * I, I),
               std::span<const std::int64_t>(col_totals_).subspan(s * J, J),
               slice_totals_[s]};
}

std::int64_t ContingencyTable::at(std::size_t i, std::size_t j, std::size_t s) const {
  return slice(s).at(i, j);
}

namespace {

std::size_t axis_bins(const Column& col, const std::vector<double>& cuts) {
  return col.kind.numeric() ? cuts.size() + 1 : col.kind.levels.size();
}

std::uint32_t point_bin(const Column& col, const std::vector<double>& cuts, std::size_t row) {
  if (col.kind.numeric()) return static_cast<std::uint32_t>(bin_of(cuts, col.values[row]));
  return static_cast<std::uint32_t>(col.values[row]);
}

std::vector<const Column*> resolve(const Dataset& data, const AxisVars& vars) {
  std::vector<const Column*> cols;
  for (std::size_t a = 0; a < vars.n_axes(); ++a) {
    const auto& name = vars.name(a);
    if (!data.has_column(name)) {
      throw std::invalid_argument("axis variable '" + name + "' is not a dataset column");
    }
    cols.push_back(&data.column(name));
  }
  return cols;
}

std::size_t flat_index(const std::vector<std::size_t>& dims, const std::uint32_t* bins) {
  std::size_t slice = 0;
  for (std::size_t a = 2; a < dims.size(); ++a) slice = slice * dims[a] + bins[a];
  return (slice * dims[0] + bins[0]) * dims[1] + bins[1];
}

}  // namespace

void validate_boundaries(const Dataset& data, const AxisVars& vars, const BoundarySet& b) {
  if (b.n_axes() != vars.n_axes()) {
    throw std::invalid_argument("boundary set has " + std::to_string(b.n_axes()) +
                                " axes, variables have " + std::to_string(vars.n_axes()));
  }
  auto cols = resolve(data, vars);
  for (std::size_t a = 0; a < cols.size(); ++a) {
    const auto& cuts = b.axis(a);
    if (cuts.empty()) continue;
    if (!cols[a]->kind.numeric()) {
      throw std::invalid_argument("categorical axis '" + cols[a]->name + "' cannot carry cuts");
    }
    const auto sp = span(*cols[a]);
    for (std::size_t k = 0; k < cuts.size(); ++k) {
      if (!(cuts[k] > sp.min && cuts[k] < sp.max)) {
        throw std::invalid_argument("cut " + std::to_string(cuts[k]) + " lies outside the span of '" +
                                    cols[a]->name + "'");
      }
      if (k > 0 && !(cuts[k] > cuts[k - 1])) {
        throw std::invalid_argument("cuts on '" + cols[a]->name + "' are not strictly increasing");
      }
    }
  }
}

ContingencyTable count_cells(const Dataset& data, const AxisVars& vars, const BoundarySet& b) {
  validate_boundaries(data, vars, b);
  auto cols = resolve(data, vars);
  const std::size_t n_axes = cols.size();
  const std::size_t n = data.n_rows();

  ContingencyTable t;
  t.boundaries_ = b;
  t.n_slices_ = 1;
  for (std::size_t a = 0; a < n_axes; ++a) {
    t.dims_.push_back(axis_bins(*cols[a], b.axis(a)));
    if (a >= 2) t.n_slices_ *= t.dims_.back();
  }
  t.cells_.assign(t.n_slices_ * t.dims_[0] * t.dims_[1], 0);
  t.point_bins_.resize(n * n_axes);
  for (std::size_t r = 0; r < n; ++r) {
    std::uint32_t* bins = t.point_bins_.data() + r * n_axes;
    for (std::size_t a = 0; a < n_axes; ++a) bins[a] = point_bin(*cols[a], b.axis(a), r);
    ++t.cells_[flat_index(t.dims_, bins)];
  }
  t.rebuild_marginals();
  return t;
}

ContingencyTable split_axis(const ContingencyTable& t, const Dataset& data, const AxisVars& vars,
                            std::size_t axis, double position) {
  if (t.point_bins_.empty()) {
    throw std::invalid_argument("split_axis needs a table produced by count_cells");
  }
  if (axis >= vars.n_axes()) throw std::out_of_range("axis index out of range");
  const Column& col = data.column(vars.name(axis));
  if (!col.kind.numeric()) {
    throw std::invalid_argument("categorical axis '" + col.name + "' cannot be split");
  }
  const auto sp = span(col);
  if (!(position > sp.min && position < sp.max)) {
    throw std::invalid_argument("split position lies outside the span of '" + col.name + "'");
  }

  ContingencyTable out;
  out.boundaries_ = t.boundaries_;
  out.boundaries_.insert(axis, position);  // throws on duplicate
  const auto split_bin = static_cast<std::uint32_t>(bin_of(t.boundaries_.axis(axis), position));

  out.dims_ = t.dims_;
  ++out.dims_[axis];
  out.n_slices_ = 1;
  for (std::size_t a = 2; a < out.dims_.size(); ++a) out.n_slices_ *= out.dims_[a];
  out.cells_.assign(out.n_slices_ * out.dims_[0] * out.dims_[1], 0);

  // Carry every old cell over, shifting indices above the split bin. Cells of
  // the split bin start in the lower half and are corrected below.
  const std::size_t n_axes = t.dims_.size();
  std::vector<std::uint32_t> idx(n_axes, 0);
  for (std::size_t flat = 0; flat < t.cells_.size(); ++flat) {
    if (t.cells_[flat] != 0) {
      std::size_t rem = flat;
      idx[1] = static_cast<std::uint32_t>(rem % t.dims_[1]);
      rem /= t.dims_[1];
      idx[0] = static_cast<std::uint32_t>(rem % t.dims_[0]);
      rem /= t.dims_[0];
      for (std::size_t a = n_axes; a-- > 2;) {
        idx[a] = static_cast<std::uint32_t>(rem % t.dims_[a]);
        rem /= t.dims_[a];
      }
      if (idx[axis] > split_bin) ++idx[axis];
      out.cells_[flat_index(out.dims_, idx.data())] += t.cells_[flat];
    }
  }

  out.point_bins_ = t.point_bins_;
  const std::size_t n = data.n_rows();
  for (std::size_t r = 0; r < n; ++r) {
    std::uint32_t* bins = out.point_bins_.data() + r * n_axes;
    if (bins[axis] > split_bin) {
      ++bins[axis];
    } else if (bins[axis] == split_bin && col.values[r] > position) {
      --out.cells_[flat_index(out.dims_, bins)];
      ++bins[axis];
      ++out.cells_[flat_index(out.dims_, bins)];
    }
  }
  out.rebuild_marginals();
  return out;
}

double pair_weight(double gap_x, double gap_y, double span_x, double span_y) {
  if (!(gap_x >= 0) || !(gap_y >= 0)) throw std::invalid_argument("negative gap");
  if (!(span_x > 0) || !(span_y > 0)) {
    throw DataError("zero span: degenerate column");
  }
  return (gap_x / span_x) * (gap_y / span_y);
}

}  // namespace bmit
