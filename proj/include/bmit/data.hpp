#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bmit {

/// Raised for malformed input files, missing cells and degenerate columns.
/// Carries the offending column and line when known.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

enum class Kind { continuous, ordinal, categorical };

struct ColumnKind {
  Kind kind = Kind::continuous;
  std::vector<std::string> levels;  // categorical only; index == level code

  static ColumnKind continuous() { return {Kind::continuous, {}}; }
  static ColumnKind ordinal() { return {Kind::ordinal, {}}; }
  static ColumnKind categorical(std::vector<std::string> levels);

  bool numeric() const { return kind != Kind::categorical; }
  bool operator==(const ColumnKind&) const = default;
};

std::string to_string(Kind k);
Kind parse_kind(const std::string& name);

/// Continuous/ordinal columns hold finite reals; categorical columns hold
/// level codes 0..L-1 stored as reals so that all axes bin the same way.
struct Column {
  std::string name;
  ColumnKind kind;
  std::vector<double> values;

  bool operator==(const Column&) const = default;
};

class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<Column> columns);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }

  const Column& column(const std::string& name) const;
  bool has_column(const std::string& name) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<Column> columns_;
  std::size_t n_rows_ = 0;
};

using TypeHints = std::map<std::string, ColumnKind>;

/// Reads an RFC-4180 style CSV with a header row. Untyped columns become
/// continuous when every cell parses as a finite number, categorical
/// otherwise.
Dataset load_csv(std::istream& in, const TypeHints& hints = {});
Dataset load_csv_file(const std::string& path, const TypeHints& hints = {});

/// Writes shortest round-trip representations so load_csv(write_csv(d)) == d
/// (given matching hints for categorical columns whose levels look numeric).
void write_csv(std::ostream& out, const Dataset& data);

/// Parses "x:continuous,z:categorical". Categorical levels are filled in on
/// load, so the hint only fixes the kind.
TypeHints parse_type_hints(const std::string& spec);

struct Midpoint {
  double position;
  double gap;
};

struct Span {
  double min;
  double max;
  double width() const { return max - min; }
};

/// Sorted distinct values of a numeric column.
std::vector<double> distinct_sorted(const Column& col);

/// Candidate cut positions halfway between consecutive distinct values.
std::vector<Midpoint> midpoints(const Column& col);

Span span(const Column& col);

}  // namespace bmit
