#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "htdbu/corpus.hpp"
#include "htdbu/generators.hpp"
#include "htdbu/metrics.hpp"
#include "htdbu/rule.hpp"

namespace htdbu {

enum class SignalKind { Accept, RetrainModel, AdjustConstraints };
std::string_view to_string(SignalKind kind);

struct SignalCause {
  std::string metric;  // "violation_rate" or "xmodal"
  double observed = 0.0;
  double threshold = 0.0;
  bool operator==(const SignalCause&) const = default;
};

struct Signal {
  SignalKind kind = SignalKind::Accept;
  std::optional<SignalCause> cause;
  bool operator==(const Signal&) const = default;
};

// Constraint violations take precedence over the xmodal ceiling. Throws
// MissingXModal when the report has no xmodal value.
Signal decide_signal(const EvalReport& report, const ConstraintReport& constraints, const RuleSpec& rule);

// Resamples the sentiment of every row whose (target, sentiment) pair the
// rule forbids, using sentiment_weights for that row's target. Other rows
// are untouched. Throws UnknownColumn, UnsatisfiableRule.
Table repair_sentiment(const Table& table, const RuleSpec& rule, std::uint64_t seed,
                       const std::map<Sentiment, double>& label_frequencies);
// Same, weighting by the sentiment frequencies of `table` itself.
Table repair_sentiment(const Table& table, const RuleSpec& rule, std::uint64_t seed);

enum class Action { Refit, RepairSentiment };
std::string_view to_string(Action action);

struct TrailEntry {
  std::size_t iteration = 0;
  std::uint64_t seed = 0;
  EvalReport report;  // after any repair
  ConstraintReport constraints;
  std::vector<Signal> signals;  // every decision taken this iteration
  std::vector<Action> actions;
  Signal signal;  // final decision of the iteration
};

struct SignalTrail {
  std::vector<TrailEntry> entries;
  bool accepted() const { return !entries.empty() && entries.back().signal.kind == SignalKind::Accept; }
};

struct ReconcileOptions {
  std::size_t max_iterations = 3;
  std::size_t rows = 12000;
  ReportOptions report;
  // Repair weights; defaults to the real training table's sentiment mix.
  std::optional<std::map<Sentiment, double>> label_frequencies;
  // When set, text is drawn for the final table.
  const TextCorpus* corpus = nullptr;
  Exec exec = Exec::Parallel;
};

struct ReconcileResult {
  Table table;
  EvalReport report;
  SignalTrail trail;
};

// Fit, sample, evaluate and decide, up to max_iterations times. Iteration i
// fits with derive_seed(seed, i). RetrainModel moves to the next iteration;
// AdjustConstraints repairs the sample and decides again within the same
// iteration. Throws ConfigError when max_iterations is 0 and InvalidRule when
// the rule does not bind to real_train.
ReconcileResult reconcile(const Table& real_train, const Table& real_test, const RuleSpec& rule,
                          const GeneratorParams& params, const ReconcileOptions& options, std::uint64_t seed);

}  // namespace htdbu
