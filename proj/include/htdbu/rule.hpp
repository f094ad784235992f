#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "htdbu/corpus.hpp"
#include "htdbu/table.hpp"

namespace htdbu {

struct RuleThresholds {
  double xmodal_max = 0.15;
  double violation_max = 0.01;
  bool operator==(const RuleThresholds&) const = default;
};

// Structural template: which sentiment labels may accompany each target
// category, plus the acceptance thresholds used by the reconciliation loop.
struct RuleSpec {
  std::string name;
  std::string target_column;
  std::string sentiment_column;
  std::optional<std::string> text_column;
  // Allowed labels per target category, kept in canonical label order.
  std::map<std::string, std::vector<Sentiment>> alignment;
  std::optional<std::map<std::string, std::map<Sentiment, double>>> alignment_weights;
  RuleThresholds thresholds;

  bool allows(std::string_view target_label, Sentiment s) const;
  bool operator==(const RuleSpec&) const = default;
};

// Throws ParseError (malformed JSON, missing/mistyped fields) or InvalidRule
// (empty allowed set, unknown label, non-positive weight, weights not on the
// allowed set, thresholds out of range).
RuleSpec parse_rule(std::string_view document);
RuleSpec load_rule(const std::filesystem::path& path);
std::string serialize_rule(const RuleSpec& rule);

enum class FindingKind { UnknownColumn, NotCategorical, MissingAlignment };

struct Finding {
  FindingKind kind;
  std::string detail;
};

std::string_view to_string(FindingKind kind);

// Empty result means the rule binds cleanly to the schema.
std::vector<Finding> validate_rule(const RuleSpec& rule, const Schema& schema);

std::set<std::pair<std::string, Sentiment>> allowed_pairs(const RuleSpec& rule);

// Sampling weights (indexed like kAllSentiments) for rows with the given
// target: explicit alignment weights when present, otherwise label_frequencies
// restricted to the allowed set. Throws UnsatisfiableRule if all are zero.
std::vector<double> sentiment_weights(const RuleSpec& rule, const std::string& target_label,
                                      const std::map<Sentiment, double>& label_frequencies);

// Appends a sentiment column (and the text column when the rule names one),
// drawing each row's label from the allowed set of its target. Throws
// InvalidRule when the rule does not validate, UnsatisfiableRule when an
// allowed label has no corpus entry.
Table compose_weak_benchmark(const Table& tabular, const TextCorpus& corpus, const RuleSpec& rule,
                             std::uint64_t seed);

// Adds or replaces the text column by drawing, per row, a corpus entry with
// that row's sentiment. Returns the table unchanged when the rule has no text
// column.
Table attach_text(const Table& table, const TextCorpus& corpus, const RuleSpec& rule,
                  std::uint64_t seed);

struct ConstraintReport {
  double violation_rate = 0.0;
  std::size_t violations = 0;
  std::size_t rows_checked = 0;
  std::map<std::string, std::size_t> violations_by_target;
};

// Throws UnknownColumn.
ConstraintReport check_constraints(const RuleSpec& rule, const Table& table);

enum class BuiltinRule { Manual, Gemini };

std::string builtin_rule_document(BuiltinRule kind);
RuleSpec builtin_rule(BuiltinRule kind);

}  // namespace htdbu
