#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bmit/data.hpp"

namespace bmit {

/// Which variable plays which role in a test. Axis 0 is X, axis 1 is Y and
/// axes 2.. are the conditioning variables in the order given here.
struct AxisVars {
  std::string x;
  std::string y;
  std::vector<std::string> cond;

  std::size_t n_axes() const { return 2 + cond.size(); }
  const std::string& name(std::size_t axis) const;
};

/// Per-axis sorted cut positions of an axis-parallel, possibly irregular grid.
/// Categorical axes never carry cuts: every level is already its own bin.
struct BoundarySet {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::vector<double>> cond;  // parallel to AxisVars::cond

  static BoundarySet empty(std::size_t n_cond) { return {{}, {}, std::vector<std::vector<double>>(n_cond)}; }

  std::size_t n_axes() const { return 2 + cond.size(); }
  std::vector<double>& axis(std::size_t a);
  const std::vector<double>& axis(std::size_t a) const;

  /// Inserts keeping the axis sorted; throws std::invalid_argument on a duplicate.
  void insert(std::size_t axis, double position);
  bool contains(std::size_t axis, double position) const;

  bool operator==(const BoundarySet&) const = default;
};

/// Number of cuts strictly below `value`, so a value equal to a cut lands in
/// the lower bin.
std::size_t bin_of(const std::vector<double>& cuts, double value);

/// Dense multidimensional cell counts. Cells of one conditioning slice are
/// contiguous and stored row-major as (x-bin, y-bin); slices are ordered
/// row-major over the conditioning axes, last axis fastest.
class ContingencyTable {
 public:
  struct Slice {
    std::size_t rows;  // I, bins along X
    std::size_t cols;  // J, bins along Y
    std::span<const std::int64_t> cells;
    std::span<const std::int64_t> row_totals;  // c_{i+}
    std::span<const std::int64_t> col_totals;  // c_{+j}
    std::int64_t total;

    std::int64_t at(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }
  };

  ContingencyTable() = default;

  /// Builds a table directly from counts (single slice when `slice_dims` is
  /// empty). Used for exact-test inputs that never came from a dataset.
  static ContingencyTable from_counts(std::size_t rows, std::size_t cols,
                                      std::vector<std::int64_t> counts,
                                      std::vector<std::size_t> slice_dims = {});

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t rows() const { return dims_[0]; }
  std::size_t cols() const { return dims_[1]; }
  std::size_t n_slices() const { return n_slices_; }
  std::int64_t total() const { return total_; }

  Slice slice(std::size_t s) const;
  std::int64_t at(std::size_t i, std::size_t j, std::size_t s = 0) const;
  std::span<const std::int64_t> cells() const { return cells_; }

  /// Grid the counts were taken on. Empty for tables built from raw counts.
  const BoundarySet& boundaries() const { return boundaries_; }
  /// Per-point bin on each axis, point-major. Empty for raw-count tables.
  std::span<const std::uint32_t> point_bins() const { return point_bins_; }

  bool operator==(const ContingencyTable&) const = default;

 private:
  friend ContingencyTable count_cells(const Dataset&, const AxisVars&, const BoundarySet&);
  friend ContingencyTable split_axis(const ContingencyTable&, const Dataset&, const AxisVars&,
                                     std::size_t, double);

  void rebuild_marginals();

  std::vector<std::size_t> dims_;
  std::size_t n_slices_ = 0;
  std::vector<std::int64_t> cells_;
  std::vector<std::int64_t> row_totals_;
  std::vector<std::int64_t> col_totals_;
  std::vector<std::int64_t> slice_totals_;
  std::int64_t total_ = 0;
  BoundarySet boundaries_;
  std::vector<std::uint32_t> point_bins_;
};

/// Checks that every cut lies strictly inside its variable's span, axes are
/// strictly increasing and categorical axes are uncut. Throws on violation.
void validate_boundaries(const Dataset& data, const AxisVars& vars, const BoundarySet& b);

ContingencyTable count_cells(const Dataset& data, const AxisVars& vars, const BoundarySet& b);

/// Adds one cut to `axis` and recounts only the points of the split bin.
/// Result equals count_cells on the enlarged boundary set.
ContingencyTable split_axis(const ContingencyTable& t, const Dataset& data, const AxisVars& vars,
                            std::size_t axis, double position);

/// Fraction of the data rectangle covered by the gap rectangle of a candidate
/// (x, y) boundary pair.
double pair_weight(double gap_x, double gap_y, double span_x, double span_y);

}  // namespace bmit
