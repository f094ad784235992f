#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "htdbu/logistic.hpp"
#include "htdbu/rule.hpp"
#include "htdbu/table.hpp"

namespace htdbu {

struct UtilityScores {
  double accuracy = 0.0;
  double f1 = 0.0;
  double auroc = 0.5;
  bool single_class = false;  // y_true had one class; auroc fixed at 0.5
  bool operator==(const UtilityScores&) const = default;
};

// Per-metric TSTR minus TRTR.
struct UtilityGap {
  double accuracy = 0.0;
  double f1 = 0.0;
  double auroc = 0.0;
  bool operator==(const UtilityGap&) const = default;
};

UtilityGap utility_gap(const UtilityScores& tstr, const UtilityScores& trtr);

// Predicted positive when score >= threshold. AUROC is the Mann-Whitney
// statistic with average ranks for tied scores. Throws LengthMismatch.
UtilityScores classification_scores(std::span<const int> y_true, std::span<const double> scores,
                                    double threshold = 0.5);

struct UtilityOptions {
  std::optional<std::string> positive_label;  // default: resolved on the test table
  std::vector<std::string> excluded;          // e.g. the text column
  LogisticParams logistic;
};

// Logistic regression fitted on `train`, scored on `test`.
UtilityScores eval_utility(const Table& train, const Table& test, const std::string& target,
                           const UtilityOptions& options = {});

struct NumericFidelity {
  double mean_diff = 0.0;
  double std_diff = 0.0;
};

// Averages over columns present and numeric in both tables. Throws
// NoNumericColumns.
NumericFidelity numeric_fidelity(const Table& real, const Table& syn);
// Average per-column TVD over columns categorical in both tables, skipping
// `excluded`. Throws NoCategoricalColumns.
double categorical_fidelity(const Table& real, const Table& syn, std::span<const std::string> excluded = {});
// Joint TVD over (target, sentiment) label pairs. Throws UnknownColumn.
double xmodal(const Table& real, const Table& syn, const std::string& target, const std::string& sentiment);

struct EvalReport {
  UtilityScores trtr;
  UtilityScores tstr;
  UtilityGap gap;
  std::optional<double> numeric_mean_diff;
  std::optional<double> numeric_std_diff;
  std::optional<double> categorical_tvd;
  std::optional<double> xmodal;
};

struct ReportOptions {
  UtilityOptions utility;
  // Reuse a TRTR result computed earlier for the same real split.
  std::optional<UtilityScores> trtr;
};

// TRTR, TSTR and gaps; fidelity against real_train where the column kinds
// allow it; xmodal when a rule is given. The rule's text column is excluded
// from every comparison.
EvalReport build_report(const Table& real_train, const Table& real_test, const Table& syn, const std::string& target,
                        const RuleSpec* rule = nullptr, const ReportOptions& options = {});

}  // namespace htdbu
