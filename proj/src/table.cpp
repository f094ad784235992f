#include "htdbu/table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <unordered_map>

#include "htdbu/error.hpp"
#include "htdbu/rng.hpp"

namespace htdbu {

std::string_view to_string(ColumnKind kind) {
  return kind == ColumnKind::Numeric ? "numeric" : "categorical";
}

std::optional<std::size_t> ColumnSpec::category_index(std::string_view label) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == label) return i;
  }
  return std::nullopt;
}

Schema::Schema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
  std::set<std::string> seen;
  for (const auto& c : columns_) {
    if (!seen.insert(c.name).second) {
      throw Error(ErrorKind::SchemaMismatch, "duplicate column name '" + c.name + "'");
    }
    if (c.is_categorical() && c.categories.empty()) {
      throw Error(ErrorKind::SchemaMismatch, "categorical column '" + c.name + "' has no categories");
    }
    if (c.is_categorical()) {
      std::set<std::string_view> labels(c.categories.begin(), c.categories.end());
      if (labels.size() != c.categories.size()) {
        throw Error(ErrorKind::SchemaMismatch, "duplicate category in column '" + c.name + "'");
      }
    }
  }
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].name == name) return j;
  }
  return std::nullopt;
}

std::size_t Schema::index_of(std::string_view name) const {
  if (auto j = find(name)) return *j;
  throw Error(ErrorKind::UnknownColumn, std::string(name));
}

Table::Table(Schema schema, std::vector<Column> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
  if (columns_.size() != schema_.size()) {
    throw Error(ErrorKind::SchemaMismatch, "column count does not match schema");
  }
  bool first = true;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const auto& spec = schema_[j];
    const auto& col = columns_[j];
    const std::size_t n = spec.is_categorical() ? col.codes.size() : col.values.size();
    if (first) {
      rows_ = n;
      first = false;
    } else if (n != rows_) {
      throw Error(ErrorKind::SchemaMismatch, "column '" + spec.name + "' has inconsistent length");
    }
    if (spec.is_categorical()) {
      const auto limit = static_cast<std::int32_t>(spec.categories.size());
      for (auto c : col.codes) {
        if (c < 0 || c >= limit) {
          throw Error(ErrorKind::SchemaMismatch, "category code out of range in '" + spec.name + "'");
        }
      }
    } else {
      for (double v : col.values) {
        if (!std::isfinite(v)) {
          throw Error(ErrorKind::SchemaMismatch, "non-finite value in '" + spec.name + "'");
        }
      }
    }
  }
}

Table Table::select_rows(std::span<const std::size_t> rows) const {
  std::vector<Column> out(columns_.size());
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (schema_[j].is_categorical()) {
      out[j].codes.reserve(rows.size());
      for (auto r : rows) out[j].codes.push_back(columns_[j].codes.at(r));
    } else {
      out[j].values.reserve(rows.size());
      for (auto r : rows) out[j].values.push_back(columns_[j].values.at(r));
    }
  }
  return Table(schema_, std::move(out));
}

Table Table::select_columns(std::span<const std::size_t> cols) const {
  std::vector<ColumnSpec> specs;
  std::vector<Column> out;
  for (auto j : cols) {
    specs.push_back(schema_[j]);
    out.push_back(columns_[j]);
  }
  return Table(Schema(std::move(specs)), std::move(out));
}

Table Table::drop_column(std::string_view name) const {
  auto idx = schema_.find(name);
  if (!idx) return *this;
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < cols(); ++j) {
    if (j != *idx) keep.push_back(j);
  }
  return select_columns(keep);
}

Table Table::with_column(ColumnSpec spec, Column column) const {
  auto specs = schema_.columns();
  specs.push_back(std::move(spec));
  auto cols = columns_;
  cols.push_back(std::move(column));
  return Table(Schema(std::move(specs)), std::move(cols));
}

Table Table::replace_column(std::size_t j, ColumnSpec spec, Column column) const {
  auto specs = schema_.columns();
  specs.at(j) = std::move(spec);
  auto cols = columns_;
  cols.at(j) = std::move(column);
  return Table(Schema(std::move(specs)), std::move(cols));
}

std::vector<std::string> order_categories(std::span<const std::string> labels) {
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels) ++counts[l];
  std::vector<std::pair<std::string, std::size_t>> items(counts.begin(), counts.end());
  // map iteration is lexicographic, so a stable sort on count keeps ties ordered
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  out.reserve(items.size());
  for (auto& [label, _] : items) out.push_back(label);
  return out;
}

bool is_missing_cell(std::string_view cell) {
  std::size_t b = 0, e = cell.size();
  while (b < e && cell[b] == ' ') ++b;
  while (e > b && cell[e - 1] == ' ') --e;
  cell = cell.substr(b, e - b);
  return cell.empty() || cell == "?";
}

namespace {

void check_widths(std::span<const std::string> header, std::span<const CsvRecord> rows) {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw Error(ErrorKind::SchemaMismatch,
                  "row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                      " fields, header has " + std::to_string(header.size()));
    }
  }
}

std::vector<std::string> column_labels(std::span<const CsvRecord> rows, std::size_t j) {
  std::vector<std::string> labels;
  labels.reserve(rows.size());
  for (const auto& r : rows) {
    labels.push_back(is_missing_cell(r[j]) ? std::string(kMissingCategory) : r[j]);
  }
  return labels;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Schema infer_schema(std::span<const std::string> header, std::span<const CsvRecord> rows) {
  if (rows.empty()) throw Error(ErrorKind::EmptyInput, "no data rows to infer a schema from");
  check_widths(header, rows);
  std::vector<ColumnSpec> specs;
  for (std::size_t j = 0; j < header.size(); ++j) {
    bool all_numeric = true;
    bool all_integral = true;
    std::size_t present = 0;
    std::set<double> distinct;
    for (const auto& r : rows) {
      if (is_missing_cell(r[j])) continue;
      ++present;
      double v;
      if (!parse_number(r[j], v)) {
        all_numeric = false;
        break;
      }
      if (v != std::floor(v)) all_integral = false;
      if (distinct.size() <= kCategoricalThreshold) distinct.insert(v);
    }
    const bool few_integral = all_integral && distinct.size() <= kCategoricalThreshold;
    ColumnSpec spec{header[j], ColumnKind::Numeric, {}};
    if (present == 0 || !all_numeric || few_integral) {
      spec.kind = ColumnKind::Categorical;
      spec.categories = order_categories(column_labels(rows, j));
    }
    specs.push_back(std::move(spec));
  }
  return Schema(std::move(specs));
}

Table table_from_records(std::span<const std::string> header, std::span<const CsvRecord> rows,
                         const std::optional<Schema>& schema_hint) {
  check_widths(header, rows);
  Schema schema = schema_hint ? *schema_hint : infer_schema(header, rows);

  std::vector<std::size_t> source(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    auto it = std::find(header.begin(), header.end(), schema[j].name);
    if (it == header.end()) {
      throw Error(ErrorKind::SchemaMismatch, "column '" + schema[j].name + "' missing from input");
    }
    source[j] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<Column> columns(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const auto& spec = schema[j];
    const std::size_t s = source[j];
    if (spec.is_categorical()) {
      std::unordered_map<std::string, std::int32_t> lookup;
      for (std::size_t c = 0; c < spec.categories.size(); ++c) {
        lookup.emplace(spec.categories[c], static_cast<std::int32_t>(c));
      }
      auto& codes = columns[j].codes;
      codes.reserve(rows.size());
      for (const auto& r : rows) {
        const std::string label = is_missing_cell(r[s]) ? std::string(kMissingCategory) : r[s];
        auto it = lookup.find(label);
        if (it == lookup.end()) {
          throw Error(ErrorKind::SchemaMismatch,
                      "unseen category '" + label + "' in column '" + spec.name + "'");
        }
        codes.push_back(it->second);
      }
    } else {
      auto& values = columns[j].values;
      values.reserve(rows.size());
      std::vector<std::size_t> missing;
      std::vector<double> present;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& cell = rows[r][s];
        if (is_missing_cell(cell)) {
          missing.push_back(r);
          values.push_back(0.0);
          continue;
        }
        double v;
        if (!parse_number(cell, v)) {
          throw Error(ErrorKind::SchemaMismatch,
                      "value '" + cell + "' in numeric column '" + spec.name + "' is not a number");
        }
        values.push_back(v);
        present.push_back(v);
      }
      if (!missing.empty()) {
        if (present.empty()) {
          throw Error(ErrorKind::SchemaMismatch, "numeric column '" + spec.name + "' is entirely missing");
        }
        const double fill = median(std::move(present));
        for (auto r : missing) values[r] = fill;
      }
    }
  }
  return Table(std::move(schema), std::move(columns));
}

Table load_table(const std::filesystem::path& path, const std::optional<Schema>& schema_hint) {
  if (!std::filesystem::exists(path)) throw Error(ErrorKind::MissingFile, path.string());
  auto records = read_csv_file(path);
  if (records.empty()) throw Error(ErrorKind::EmptyTable, path.string() + " has no header");
  const CsvRecord header = records.front();
  std::span<const CsvRecord> rows(records.data() + 1, records.size() - 1);
  if (rows.empty()) throw Error(ErrorKind::EmptyTable, path.string() + " has no data rows");
  return table_from_records(header, rows, schema_hint);
}

void write_table(const Table& table, std::ostream& out) {
  std::vector<std::string> fields(table.cols());
  for (std::size_t j = 0; j < table.cols(); ++j) fields[j] = table.schema()[j].name;
  write_csv_record(out, fields);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t j = 0; j < table.cols(); ++j) {
      fields[j] = table.schema()[j].is_categorical() ? table.label(j, r)
                                                     : format_number(table.numeric(j)[r]);
    }
    write_csv_record(out, fields);
  }
}

void write_table(const Table& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IOError, "cannot write " + path.string());
  write_table(table, out);
  if (!out) throw Error(ErrorKind::IOError, "write failed for " + path.string());
}

namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.index(i)]);
  }
}

}  // namespace

SplitResult split(const Table& table, double test_fraction, std::uint64_t seed,
                  const std::optional<std::string>& stratify_on) {
  const std::size_t n = table.rows();
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorKind::DegenerateSplit, "test fraction must lie in (0, 1)");
  }
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  if (n < 2 || n_test == 0 || n_test >= n) {
    throw Error(ErrorKind::DegenerateSplit,
                "split of " + std::to_string(n) + " rows leaves an empty side");
  }
  Rng rng(derive_seed(seed, "split"));
  std::vector<char> in_test(n, 0);

  if (stratify_on) {
    const std::size_t j = table.schema().index_of(*stratify_on);
    if (!table.schema()[j].is_categorical()) {
      throw Error(ErrorKind::DegenerateSplit, "cannot stratify on numeric column " + *stratify_on);
    }
    const std::size_t k = table.schema()[j].categories.size();
    std::vector<std::vector<std::size_t>> strata(k);
    for (std::size_t r = 0; r < n; ++r) strata[static_cast<std::size_t>(table.codes(j)[r])].push_back(r);

    // largest-remainder apportionment of the test quota across strata
    std::vector<std::size_t> quota(k);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const double exact = test_fraction * static_cast<double>(strata[c].size());
      quota[c] = static_cast<std::size_t>(std::floor(exact));
      assigned += quota[c];
      remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < n_test && i < remainders.size(); ++i) {
      const std::size_t c = remainders[i].second;
      if (quota[c] < strata[c].size()) {
        ++quota[c];
        ++assigned;
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      shuffle(strata[c], rng);
      for (std::size_t i = 0; i < quota[c]; ++i) in_test[strata[c][i]] = 1;
    }
  } else {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);
    for (std::size_t i = 0; i < n_test; ++i) in_test[order[i]] = 1;
  }

  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t r = 0; r < n; ++r) (in_test[r] ? test_rows : train_rows).push_back(r);
  if (train_rows.empty() || test_rows.empty()) {
    throw Error(ErrorKind::DegenerateSplit, "split leaves an empty side");
  }
  return SplitResult{table.select_rows(train_rows), table.select_rows(test_rows)};
}

}  // namespace htdbu
