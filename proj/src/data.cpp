#include "bmit/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <set>
#include <unordered_map>

namespace bmit {

ColumnKind ColumnKind::categorical(std::vector<std::string> levels) {
  std::set<std::string> seen(levels.begin(), levels.end());
  if (seen.size() != levels.size()) {
    throw DataError("categorical level list contains duplicates");
  }
  return {Kind::categorical, std::move(levels)};
}

std::string to_string(Kind k) {
  switch (k) {
    case Kind::continuous: return "continuous";
    case Kind::ordinal: return "ordinal";
    case Kind::categorical: return "categorical";
  }
  return "?";
}

Kind parse_kind(const std::string& name) {
  if (name == "continuous") return Kind::continuous;
  if (name == "ordinal") return Kind::ordinal;
  if (name == "categorical") return Kind::categorical;
  throw std::invalid_argument("unknown column kind '" + name + "'");
}

Dataset::Dataset(std::vector<Column> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw DataError("dataset has no columns");
  n_rows_ = columns_.front().values.size();
  if (n_rows_ == 0) throw DataError("dataset has no rows");
  std::set<std::string> names;
  for (const auto& c : columns_) {
    if (!names.insert(c.name).second) {
      throw DataError("duplicate column name '" + c.name + "'");
    }
    if (c.values.size() != n_rows_) {
      throw DataError("column '" + c.name + "' has " + std::to_string(c.values.size()) +
                      " values, expected " + std::to_string(n_rows_));
    }
    if (c.kind.numeric()) {
      for (std::size_t r = 0; r < n_rows_; ++r) {
        if (!std::isfinite(c.values[r])) {
          throw DataError("non-finite value in column '" + c.name + "' at row " +
                          std::to_string(r + 1));
        }
      }
    } else {
      if (c.kind.levels.empty()) {
        throw DataError("categorical column '" + c.name + "' has no levels");
      }
      const auto n_levels = static_cast<double>(c.kind.levels.size());
      for (double v : c.values) {
        if (!(v >= 0 && v < n_levels) || v != std::floor(v)) {
          throw DataError("invalid level code in column '" + c.name + "'");
        }
      }
    }
  }
}

const Column& Dataset::column(const std::string& name) const {
  for (const auto& c : columns_) {
    if (c.name == name) return c;
  }
  throw DataError("no column named '" + name + "'");
}

bool Dataset::has_column(const std::string& name) const {
  return std::any_of(columns_.begin(), columns_.end(),
                     [&](const Column& c) { return c.name == name; });
}

namespace {

struct Record {
  std::vector<std::string> fields;
  std::vector<bool> quoted;
  std::size_t line;
};

// RFC 4180: fields separated by commas, optionally double-quoted, "" escapes
// a quote inside a quoted field, quoted fields may span lines.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in)
      : text_(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()) {}

  bool next(Record& rec) {
    rec.fields.clear();
    rec.quoted.clear();
    if (pos_ >= text_.size()) return false;
    rec.line = line_;
    std::string field;
    bool quoted = false;
    while (true) {
      if (pos_ >= text_.size()) {
        push(rec, field, quoted);
        return true;
      }
      char c = text_[pos_];
      if (c == '"' && field.empty() && !quoted) {
        quoted = true;
        ++pos_;
        read_quoted(field, rec.line);
        if (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '\n' &&
            text_[pos_] != '\r') {
          throw DataError("malformed CSV at line " + std::to_string(line_) +
                          ": text after closing quote");
        }
        continue;
      }
      if (c == ',') {
        push(rec, field, quoted);
        ++pos_;
        continue;
      }
      if (c == '\r' || c == '\n') {
        push(rec, field, quoted);
        if (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') ++pos_;
        ++pos_;
        ++line_;
        return true;
      }
      if (c == '"') {
        throw DataError("malformed CSV at line " + std::to_string(line_) +
                        ": stray quote in unquoted field");
      }
      field.push_back(c);
      ++pos_;
    }
  }

 private:
  static void push(Record& rec, std::string& field, bool& quoted) {
    rec.fields.push_back(std::move(field));
    rec.quoted.push_back(quoted);
    field.clear();
    quoted = false;
  }

  void read_quoted(std::string& field, std::size_t start_line) {
    while (pos_ < text_.size()) {
      char c = text_[pos_++];
      if (c == '"') {
        if (pos_ < text_.size() && text_[pos_] == '"') {
          field.push_back('"');
          ++pos_;
          continue;
        }
        return;
      }
      if (c == '\n') ++line_;
      field.push_back(c);
    }
    throw DataError("malformed CSV at line " + std::to_string(start_line) +
                    ": unterminated quoted field");
  }

  std::string text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool is_blank(const Record& rec) {
  return rec.fields.size() == 1 && !rec.quoted[0] && trim(rec.fields[0]).empty();
}

}  // namespace

Dataset load_csv(std::istream& in, const TypeHints& hints) {
  CsvReader reader(in);
  Record header;
  do {
    if (!reader.next(header)) throw DataError("empty CSV input");
  } while (is_blank(header));

  std::vector<std::string> names;
  for (const auto& f : header.fields) names.emplace_back(trim(f));
  for (const auto& [name, kind] : hints) {
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw DataError("type hint for unknown column '" + name + "'");
    }
  }

  std::vector<std::vector<std::string>> cells(names.size());
  std::vector<std::size_t> lines;
  Record rec;
  while (reader.next(rec)) {
    if (is_blank(rec)) continue;
    if (rec.fields.size() != names.size()) {
      throw DataError("malformed CSV at line " + std::to_string(rec.line) + ": expected " +
                      std::to_string(names.size()) + " fields, found " +
                      std::to_string(rec.fields.size()));
    }
    for (std::size_t c = 0; c < names.size(); ++c) cells[c].push_back(std::move(rec.fields[c]));
    lines.push_back(rec.line);
  }
  if (lines.empty()) throw DataError("CSV has a header but no data rows");

  std::vector<Column> columns;
  columns.reserve(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    Column col;
    col.name = names[c];
    auto hint = hints.find(col.name);
    std::optional<ColumnKind> kind;
    if (hint != hints.end()) kind = hint->second;

    auto missing = [&](std::size_t r) {
      return DataError("missing value in column '" + col.name + "' at line " +
                       std::to_string(lines[r]));
    };

    bool numeric = !kind || kind->numeric();
    std::vector<double> values;
    if (numeric) {
      values.reserve(lines.size());
      for (std::size_t r = 0; r < lines.size(); ++r) {
        auto v = parse_number(cells[c][r]);
        if (!v) {
          if (trim(cells[c][r]).empty()) throw missing(r);
          if (kind) {
            throw DataError("unparseable number '" + cells[c][r] + "' in column '" + col.name +
                            "' at line " + std::to_string(lines[r]));
          }
          numeric = false;
          break;
        }
        if (!std::isfinite(*v)) {
          throw DataError("non-finite value in column '" + col.name + "' at line " +
                          std::to_string(lines[r]));
        }
        values.push_back(*v);
      }
    }

    if (numeric) {
      col.kind = kind ? *kind : ColumnKind::continuous();
      col.values = std::move(values);
    } else {
      std::vector<std::string> levels = kind ? kind->levels : std::vector<std::string>{};
      const bool fixed_levels = !levels.empty();
      std::unordered_map<std::string, std::size_t> code;
      for (std::size_t i = 0; i < levels.size(); ++i) code.emplace(levels[i], i);
      col.values.reserve(lines.size());
      for (std::size_t r = 0; r < lines.size(); ++r) {
        std::string level(trim(cells[c][r]));
        if (level.empty()) throw missing(r);
        auto it = code.find(level);
        if (it == code.end()) {
          if (fixed_levels) {
            throw DataError("unknown level '" + level + "' in column '" + col.name +
                            "' at line " + std::to_string(lines[r]));
          }
          it = code.emplace(level, levels.size()).first;
          levels.push_back(level);
        }
        col.values.push_back(static_cast<double>(it->second));
      }
      col.kind = ColumnKind::categorical(std::move(levels));
    }
    columns.push_back(std::move(col));
  }
  return Dataset(std::move(columns));
}

Dataset load_csv_file(const std::string& path, const TypeHints& hints) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return load_csv(in, hints);
}

namespace {

void write_field(std::ostream& out, const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos && trim(s) == s) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

void write_csv(std::ostream& out, const Dataset& data) {
  const auto& cols = data.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) out << ',';
    write_field(out, cols[c].name);
  }
  out << '\n';
  char buf[64];
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out << ',';
      const auto& col = cols[c];
      if (col.kind.numeric()) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, col.values[r]);
        out.write(buf, ptr - buf);
      } else {
        write_field(out, col.kind.levels[static_cast<std::size_t>(col.values[r])]);
      }
    }
    out << '\n';
  }
}

TypeHints parse_type_hints(const std::string& spec) {
  TypeHints hints;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto end = spec.find(',', start);
    if (end == std::string::npos) end = spec.size();
    std::string item = spec.substr(start, end - start);
    if (!item.empty()) {
      auto colon = item.rfind(':');
      if (colon == std::string::npos || colon == 0) {
        throw std::invalid_argument("type hint '" + item + "' is not name:kind");
      }
      hints[item.substr(0, colon)] = ColumnKind{parse_kind(item.substr(colon + 1)), {}};
    }
    start = end + 1;
  }
  return hints;
}

std::vector<double> distinct_sorted(const Column& col) {
  if (!col.kind.numeric()) {
    throw DataError("column '" + col.name + "' is categorical, expected numeric");
  }
  std::vector<double> v = col.values;
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<Midpoint> midpoints(const Column& col) {
  const auto v = distinct_sorted(col);
  if (v.size() < 2) {
    throw DataError("column '" + col.name + "' has fewer than 2 distinct values");
  }
  std::vector<Midpoint> out;
  out.reserve(v.size() - 1);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    out.push_back({v[i] + (v[i + 1] - v[i]) / 2, v[i + 1] - v[i]});
  }
  return out;
}

Span span(const Column& col) {
  if (col.values.empty()) throw DataError("column '" + col.name + "' is empty");
  auto [lo, hi] = std::minmax_element(col.values.begin(), col.values.end());
  return {*lo, *hi};
}

}  // namespace bmit
