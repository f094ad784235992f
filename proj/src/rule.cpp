#include "htdbu/rule.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "htdbu/error.hpp"
#include "htdbu/rng.hpp"

namespace htdbu {

using json = nlohmann::ordered_json;

bool RuleSpec::allows(std::string_view target_label, Sentiment s) const {
  auto it = alignment.find(std::string(target_label));
  if (it == alignment.end()) return false;
  return std::find(it->second.begin(), it->second.end(), s) != it->second.end();
}

std::string_view to_string(FindingKind kind) {
  switch (kind) {
    case FindingKind::UnknownColumn: return "UnknownColumn";
    case FindingKind::NotCategorical: return "NotCategorical";
    case FindingKind::MissingAlignment: return "MissingAlignment";
  }
  return "Finding";
}

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }
[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidRule, what); }

std::string require_string(const json& doc, const char* key) {
  if (!doc.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  if (!doc[key].is_string()) parse_fail(std::string("field '") + key + "' must be a string");
  return doc[key].get<std::string>();
}

Sentiment require_label(const json& value) {
  if (!value.is_string()) parse_fail("sentiment labels must be strings");
  auto s = parse_sentiment(value.get<std::string>());
  if (!s) invalid("unknown sentiment label '" + value.get<std::string>() + "'");
  return *s;
}

double require_number(const json& value, const std::string& what) {
  if (!value.is_number()) parse_fail(what + " must be a number");
  return value.get<double>();
}

}  // namespace

RuleSpec parse_rule(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    parse_fail(e.what());
  }
  if (!doc.is_object()) parse_fail("rule document must be a JSON object");
  static const std::set<std::string> known = {"name",      "target_column",     "sentiment_column",
                                              "text_column", "alignment",       "alignment_weights",
                                              "thresholds"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) parse_fail("unknown field '" + key + "'");
  }

  RuleSpec rule;
  rule.name = require_string(doc, "name");
  rule.target_column = require_string(doc, "target_column");
  rule.sentiment_column = require_string(doc, "sentiment_column");
  if (doc.contains("text_column") && !doc["text_column"].is_null()) {
    rule.text_column = require_string(doc, "text_column");
  }

  if (!doc.contains("alignment") || !doc["alignment"].is_object()) {
    parse_fail("field 'alignment' must be an object");
  }
  if (doc["alignment"].empty()) invalid("alignment is empty");
  for (const auto& [target, labels] : doc["alignment"].items()) {
    if (!labels.is_array()) parse_fail("alignment['" + target + "'] must be an array");
    std::vector<Sentiment> allowed;
    for (const auto& l : labels) {
      Sentiment s = require_label(l);
      if (std::find(allowed.begin(), allowed.end(), s) != allowed.end()) {
        invalid("duplicate label in alignment['" + target + "']");
      }
      allowed.push_back(s);
    }
    if (allowed.empty()) invalid("empty allowed set for target '" + target + "'");
    std::sort(allowed.begin(), allowed.end());
    rule.alignment.emplace(target, std::move(allowed));
  }

  if (doc.contains("alignment_weights") && !doc["alignment_weights"].is_null()) {
    const auto& w = doc["alignment_weights"];
    if (!w.is_object()) parse_fail("field 'alignment_weights' must be an object");
    std::map<std::string, std::map<Sentiment, double>> weights;
    for (const auto& [target, per_label] : w.items()) {
      auto it = rule.alignment.find(target);
      if (it == rule.alignment.end()) invalid("weights given for unaligned target '" + target + "'");
      if (!per_label.is_object()) parse_fail("alignment_weights['" + target + "'] must be an object");
      std::map<Sentiment, double> m;
      for (const auto& [label, value] : per_label.items()) {
        auto s = parse_sentiment(label);
        if (!s) invalid("unknown sentiment label '" + label + "'");
        double v = require_number(value, "weight");
        if (!(v > 0.0) || !std::isfinite(v)) invalid("weights must be positive and finite");
        if (!rule.allows(target, *s)) invalid("weight for disallowed label '" + label + "'");
        m[*s] = v;
      }
      if (m.size() != it->second.size()) {
        invalid("weights for target '" + target + "' do not cover its allowed set");
      }
      weights.emplace(target, std::move(m));
    }
    if (weights.size() != rule.alignment.size()) invalid("alignment_weights must cover every target");
    rule.alignment_weights = std::move(weights);
  }

  if (doc.contains("thresholds") && !doc["thresholds"].is_null()) {
    const auto& t = doc["thresholds"];
    if (!t.is_object()) parse_fail("field 'thresholds' must be an object");
    for (const auto& [key, _] : t.items()) {
      if (key != "xmodal_max" && key != "violation_max") parse_fail("unknown threshold '" + key + "'");
    }
    if (t.contains("xmodal_max")) rule.thresholds.xmodal_max = require_number(t["xmodal_max"], "xmodal_max");
    if (t.contains("violation_max")) {
      rule.thresholds.violation_max = require_number(t["violation_max"], "violation_max");
    }
  }
  if (!(rule.thresholds.xmodal_max >= 0.0)) invalid("xmodal_max must be >= 0");
  if (!(rule.thresholds.violation_max >= 0.0 && rule.thresholds.violation_max <= 1.0)) {
    invalid("violation_max must lie in [0, 1]");
  }
  return rule;
}

RuleSpec load_rule(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_rule(buf.str());
}

std::string serialize_rule(const RuleSpec& rule) {
  json doc;
  doc["name"] = rule.name;
  doc["target_column"] = rule.target_column;
  doc["sentiment_column"] = rule.sentiment_column;
  if (rule.text_column) doc["text_column"] = *rule.text_column;
  json align = json::object();
  for (const auto& [target, labels] : rule.alignment) {
    json arr = json::array();
    for (auto s : labels) arr.push_back(std::string(to_string(s)));
    align[target] = std::move(arr);
  }
  doc["alignment"] = std::move(align);
  if (rule.alignment_weights) {
    json w = json::object();
    for (const auto& [target, m] : *rule.alignment_weights) {
      json per = json::object();
      for (const auto& [s, v] : m) per[std::string(to_string(s))] = v;
      w[target] = std::move(per);
    }
    doc["alignment_weights"] = std::move(w);
  }
  doc["thresholds"] = {{"xmodal_max", rule.thresholds.xmodal_max},
                       {"violation_max", rule.thresholds.violation_max}};
  return doc.dump(2) + "\n";
}

std::vector<Finding> validate_rule(const RuleSpec& rule, const Schema& schema) {
  std::vector<Finding> findings;
  auto j = schema.find(rule.target_column);
  if (!j) {
    findings.push_back({FindingKind::UnknownColumn, rule.target_column});
    return findings;
  }
  const auto& spec = schema[*j];
  if (!spec.is_categorical()) {
    findings.push_back({FindingKind::NotCategorical, rule.target_column});
    return findings;
  }
  for (const auto& category : spec.categories) {
    if (!rule.alignment.count(category)) findings.push_back({FindingKind::MissingAlignment, category});
  }
  return findings;
}

std::set<std::pair<std::string, Sentiment>> allowed_pairs(const RuleSpec& rule) {
  std::set<std::pair<std::string, Sentiment>> out;
  for (const auto& [target, labels] : rule.alignment) {
    for (auto s : labels) out.emplace(target, s);
  }
  return out;
}

std::vector<double> sentiment_weights(const RuleSpec& rule, const std::string& target_label,
                                      const std::map<Sentiment, double>& label_frequencies) {
  std::vector<double> w(kAllSentiments.size(), 0.0);
  auto it = rule.alignment.find(target_label);
  if (it == rule.alignment.end()) {
    throw Error(ErrorKind::InvalidRule, "no alignment for target '" + target_label + "'");
  }
  double total = 0.0;
  for (auto s : it->second) {
    double v = 0.0;
    if (rule.alignment_weights) {
      v = rule.alignment_weights->at(target_label).at(s);
    } else if (auto f = label_frequencies.find(s); f != label_frequencies.end()) {
      v = f->second;
    }
    w[static_cast<std::size_t>(s)] = v;
    total += v;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorKind::UnsatisfiableRule,
                "no sentiment label available for target '" + target_label + "'");
  }
  return w;
}

namespace {

Column labels_to_column(const std::vector<std::string>& labels, std::vector<std::string>& categories) {
  categories = order_categories(labels);
  std::map<std::string, std::int32_t> lookup;
  for (std::size_t c = 0; c < categories.size(); ++c) lookup[categories[c]] = static_cast<std::int32_t>(c);
  std::vector<std::int32_t> codes;
  codes.reserve(labels.size());
  for (const auto& l : labels) codes.push_back(lookup.at(l));
  return Column::categorical(std::move(codes));
}

std::string join_findings(const std::vector<Finding>& findings) {
  std::string out;
  for (const auto& f : findings) {
    if (!out.empty()) out += "; ";
    out += std::string(to_string(f.kind)) + "(" + f.detail + ")";
  }
  return out;
}

}  // namespace

Table compose_weak_benchmark(const Table& tabular, const TextCorpus& corpus, const RuleSpec& rule,
                             std::uint64_t seed) {
  if (auto findings = validate_rule(rule, tabular.schema()); !findings.empty()) {
    throw Error(ErrorKind::InvalidRule, join_findings(findings));
  }
  for (const auto& [target, labels] : rule.alignment) {
    for (auto s : labels) {
      if (corpus.count(s) == 0) {
        throw Error(ErrorKind::UnsatisfiableRule,
                    "corpus has no '" + std::string(to_string(s)) + "' entries for target '" + target + "'");
      }
    }
  }
  const std::size_t tj = tabular.schema().index_of(rule.target_column);
  const auto& target_spec = tabular.schema()[tj];
  const auto frequencies = corpus.label_frequencies();
  std::vector<std::vector<double>> weights;
  for (const auto& label : target_spec.categories) weights.push_back(sentiment_weights(rule, label, frequencies));

  Rng rng(derive_seed(seed, "compose"));
  std::vector<std::string> sentiments;
  std::vector<std::string> texts;
  sentiments.reserve(tabular.rows());
  for (std::size_t r = 0; r < tabular.rows(); ++r) {
    const auto code = static_cast<std::size_t>(tabular.codes(tj)[r]);
    const auto s = kAllSentiments[rng.categorical(weights[code])];
    sentiments.emplace_back(to_string(s));
    const auto& pool = corpus.indices_of(s);
    const auto& entry = corpus.entries()[pool[rng.index(pool.size())]];
    if (rule.text_column) texts.push_back(entry.text);
  }

  ColumnSpec sentiment_spec{rule.sentiment_column, ColumnKind::Categorical, {}};
  Column sentiment_col = labels_to_column(sentiments, sentiment_spec.categories);
  Table out = tabular.with_column(std::move(sentiment_spec), std::move(sentiment_col));
  if (rule.text_column) {
    ColumnSpec text_spec{*rule.text_column, ColumnKind::Categorical, {}};
    Column text_col = labels_to_column(texts, text_spec.categories);
    out = out.with_column(std::move(text_spec), std::move(text_col));
  }
  return out;
}

Table attach_text(const Table& table, const TextCorpus& corpus, const RuleSpec& rule,
                  std::uint64_t seed) {
  if (!rule.text_column) return table;
  const std::size_t sj = table.schema().index_of(rule.sentiment_column);
  Rng rng(derive_seed(seed, "text"));
  std::vector<std::string> texts;
  texts.reserve(table.rows());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    auto s = parse_sentiment(table.label(sj, r));
    if (!s || corpus.count(*s) == 0) {
      throw Error(ErrorKind::UnsatisfiableRule, "no corpus text for label '" + table.label(sj, r) + "'");
    }
    const auto& pool = corpus.indices_of(*s);
    texts.push_back(corpus.entries()[pool[rng.index(pool.size())]].text);
  }
  ColumnSpec text_spec{*rule.text_column, ColumnKind::Categorical, {}};
  Column text_col = labels_to_column(texts, text_spec.categories);
  Table base = table.drop_column(*rule.text_column);
  return base.with_column(std::move(text_spec), std::move(text_col));
}

ConstraintReport check_constraints(const RuleSpec& rule, const Table& table) {
  const std::size_t tj = table.schema().index_of(rule.target_column);
  const std::size_t sj = table.schema().index_of(rule.sentiment_column);
  ConstraintReport report;
  report.rows_checked = table.rows();
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const std::string target = table.schema()[tj].is_categorical()
                                   ? table.label(tj, r)
                                   : format_number(table.numeric(tj)[r]);
    const auto s = table.schema()[sj].is_categorical() ? parse_sentiment(table.label(sj, r))
                                                       : std::optional<Sentiment>{};
    if (!s || !rule.allows(target, *s)) {
      ++report.violations;
      ++report.violations_by_target[target];
    }
  }
  report.violation_rate = report.rows_checked
                              ? static_cast<double>(report.violations) / static_cast<double>(report.rows_checked)
                              : 0.0;
  return report;
}

namespace {

constexpr const char* kManualRule = R"({
  "name": "manual",
  "target_column": "y",
  "sentiment_column": "sentiment",
  "text_column": "text",
  "alignment": {
    "0": ["neutral", "negative"],
    "1": ["positive", "neutral"]
  },
  "thresholds": {
    "xmodal_max": 0.15,
    "violation_max": 0.01
  }
}
)";

constexpr const char* kGeminiRule = R"({
  "name": "gemini",
  "target_column": "y",
  "sentiment_column": "sentiment",
  "text_column": "text",
  "alignment": {
    "0": ["neutral", "negative"],
    "1": ["positive"]
  },
  "thresholds": {
    "xmodal_max": 0.15,
    "violation_max": 0.01
  }
}
)";

}  // namespace

std::string builtin_rule_document(BuiltinRule kind) {
  return kind == BuiltinRule::Manual ? kManualRule : kGeminiRule;
}

RuleSpec builtin_rule(BuiltinRule kind) { return parse_rule(builtin_rule_document(kind)); }

}  // namespace htdbu
