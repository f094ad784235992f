#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "htdbu/csv.hpp"

namespace htdbu {

enum class ColumnKind { Numeric, Categorical };

std::string_view to_string(ColumnKind kind);

inline constexpr std::string_view kMissingCategory = "__missing__";
// Integral, numeric-parseable columns with at most this many distinct values
// are treated as categorical.
inline constexpr std::size_t kCategoricalThreshold = 20;

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  // Categorical only: labels in frequency-descending order (ties lexicographic).
  std::vector<std::string> categories;

  bool is_categorical() const { return kind == ColumnKind::Categorical; }
  std::optional<std::size_t> category_index(std::string_view label) const;
  bool operator==(const ColumnSpec&) const = default;
};

class Schema {
 public:
  Schema() = default;
  // Throws SchemaMismatch on duplicate names or a categorical column
  // without categories.
  explicit Schema(std::vector<ColumnSpec> columns);

  std::size_t size() const { return columns_.size(); }
  const ColumnSpec& operator[](std::size_t j) const { return columns_[j]; }
  const std::vector<ColumnSpec>& columns() const { return columns_; }

  std::optional<std::size_t> find(std::string_view name) const;
  // Throws UnknownColumn.
  std::size_t index_of(std::string_view name) const;

  bool operator==(const Schema&) const = default;

 private:
  std::vector<ColumnSpec> columns_;
};

// Storage for one column. Numeric columns use `values`, categorical columns
// use `codes` (indices into the schema's category list).
struct Column {
  std::vector<double> values;
  std::vector<std::int32_t> codes;

  static Column numeric(std::vector<double> v) { return Column{std::move(v), {}}; }
  static Column categorical(std::vector<std::int32_t> c) { return Column{{}, std::move(c)}; }
  bool operator==(const Column&) const = default;
};

// Column-major mixed-type table. Immutable once built; every transform
// returns a new table.
class Table {
 public:
  Table() = default;
  // Validates lengths, code ranges and finiteness; throws SchemaMismatch.
  Table(Schema schema, std::vector<Column> columns);

  const Schema& schema() const { return schema_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }
  const Column& column(std::size_t j) const { return columns_[j]; }

  std::span<const double> numeric(std::size_t j) const { return columns_[j].values; }
  std::span<const std::int32_t> codes(std::size_t j) const { return columns_[j].codes; }
  const std::string& label(std::size_t j, std::size_t row) const {
    return schema_[j].categories[static_cast<std::size_t>(columns_[j].codes[row])];
  }
  // Numeric value, or the category code as a real number.
  double encoded(std::size_t j, std::size_t row) const {
    return schema_[j].is_categorical() ? static_cast<double>(columns_[j].codes[row])
                                       : columns_[j].values[row];
  }

  Table select_rows(std::span<const std::size_t> rows) const;
  Table select_columns(std::span<const std::size_t> cols) const;
  Table drop_column(std::string_view name) const;  // no-op when absent
  Table with_column(ColumnSpec spec, Column column) const;
  Table replace_column(std::size_t j, ColumnSpec spec, Column column) const;

  bool operator==(const Table&) const = default;

 private:
  Schema schema_;
  std::vector<Column> columns_;
  std::size_t rows_ = 0;
};

// Orders labels by descending count, ties broken lexicographically.
std::vector<std::string> order_categories(std::span<const std::string> labels);

bool is_missing_cell(std::string_view cell);

// Decides Numeric/Categorical per column from raw cells (header excluded).
// Throws EmptyInput when there are no data rows.
Schema infer_schema(std::span<const std::string> header, std::span<const CsvRecord> rows);

// Builds a table from raw cells. With a hint, the header must name every hint
// column; unseen categories are SchemaMismatch. Missing cells ("" or "?")
// become the column median (numeric) or the "__missing__" category.
Table table_from_records(std::span<const std::string> header, std::span<const CsvRecord> rows,
                         const std::optional<Schema>& schema_hint = std::nullopt);

// Throws MissingFile, SchemaMismatch, EmptyTable.
Table load_table(const std::filesystem::path& path,
                 const std::optional<Schema>& schema_hint = std::nullopt);

void write_table(const Table& table, std::ostream& out);
void write_table(const Table& table, const std::filesystem::path& path);

struct SplitResult {
  Table train;
  Table test;
};

// Disjoint partition with |test| = round(test_fraction * n). Stratifies on
// `stratify_on` when given. Row order within each side follows the source.
// Throws DegenerateSplit when either side would be empty.
SplitResult split(const Table& table, double test_fraction, std::uint64_t seed,
                  const std::optional<std::string>& stratify_on = std::nullopt);

}  // namespace htdbu
