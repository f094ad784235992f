#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "htdbu/corpus.hpp"
#include "htdbu/table.hpp"

namespace htdbu {

// label -> relative frequency, in the column's category order
using Distribution = std::vector<std::pair<std::string, double>>;

Distribution category_distribution(const Table& table, std::size_t column);

struct NumericStats {
  double mean = 0.0;
  double std = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
};

NumericStats numeric_stats(std::span<const double> values);

struct ColumnSummary {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  std::optional<NumericStats> stats;  // numeric columns
  Distribution frequencies;           // categorical columns
};

struct TargetSummary {
  std::string column;
  Distribution distribution;
};

// Compact description of a dataset handed to whoever authors the rule file.
struct DatasetSummary {
  std::size_t row_count = 0;
  std::vector<ColumnSummary> columns;
  std::optional<TargetSummary> target;
  std::optional<std::map<Sentiment, double>> sentiment_distribution;
};

// Throws UnknownColumn when target is absent, SchemaMismatch when it is
// numeric, EmptyTable when the table has no rows.
DatasetSummary summarize(const Table& table, const TextCorpus* corpus = nullptr,
                         const std::optional<std::string>& target = std::nullopt);

nlohmann::ordered_json to_json(const DatasetSummary& summary);

}  // namespace htdbu
