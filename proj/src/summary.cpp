#include "htdbu/summary.hpp"

#include <algorithm>
#include <cmath>

#include "htdbu/error.hpp"

namespace htdbu {

Distribution category_distribution(const Table& table, std::size_t column) {
  const auto& spec = table.schema()[column];
  std::vector<std::size_t> counts(spec.categories.size(), 0);
  for (auto c : table.codes(column)) ++counts[static_cast<std::size_t>(c)];
  Distribution out;
  const double n = static_cast<double>(table.rows());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    out.emplace_back(spec.categories[c], n > 0 ? static_cast<double>(counts[c]) / n : 0.0);
  }
  return out;
}

NumericStats numeric_stats(std::span<const double> values) {
  NumericStats s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

DatasetSummary summarize(const Table& table, const TextCorpus* corpus,
                         const std::optional<std::string>& target) {
  if (table.rows() == 0) throw Error(ErrorKind::EmptyTable, "cannot summarize an empty table");
  DatasetSummary out;
  out.row_count = table.rows();
  for (std::size_t j = 0; j < table.cols(); ++j) {
    const auto& spec = table.schema()[j];
    ColumnSummary cs{spec.name, spec.kind, std::nullopt, {}};
    if (spec.is_categorical()) {
      cs.frequencies = category_distribution(table, j);
    } else {
      cs.stats = numeric_stats(table.numeric(j));
    }
    out.columns.push_back(std::move(cs));
  }
  if (target) {
    const std::size_t j = table.schema().index_of(*target);
    if (!table.schema()[j].is_categorical()) {
      throw Error(ErrorKind::SchemaMismatch, "target column '" + *target + "' is not categorical");
    }
    out.target = TargetSummary{*target, category_distribution(table, j)};
  }
  if (corpus) out.sentiment_distribution = corpus->label_frequencies();
  return out;
}

nlohmann::ordered_json to_json(const DatasetSummary& summary) {
  using json = nlohmann::ordered_json;
  auto dist_json = [](const Distribution& d) {
    json o = json::object();
    for (const auto& [label, p] : d) o[label] = p;
    return o;
  };
  json doc;
  doc["format"] = "htdbu.summary/1";
  doc["row_count"] = summary.row_count;
  json cols = json::array();
  for (const auto& c : summary.columns) {
    json jc;
    jc["name"] = c.name;
    jc["kind"] = std::string(to_string(c.kind));
    if (c.stats) {
      jc["mean"] = c.stats->mean;
      jc["std"] = c.stats->std;
      jc["min"] = c.stats->min;
      jc["max"] = c.stats->max;
    } else {
      jc["frequencies"] = dist_json(c.frequencies);
    }
    cols.push_back(std::move(jc));
  }
  doc["columns"] = std::move(cols);
  if (summary.target) {
    doc["target"] = {{"column", summary.target->column},
                     {"distribution", dist_json(summary.target->distribution)}};
  }
  if (summary.sentiment_distribution) {
    json s = json::object();
    for (const auto& [label, p] : *summary.sentiment_distribution) s[std::string(to_string(label))] = p;
    doc["sentiment_distribution"] = std::move(s);
  }
  return doc;
}

}  // namespace htdbu
