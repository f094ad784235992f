#include "htdbu/engine.hpp"

#include "htdbu/error.hpp"
#include "htdbu/rng.hpp"

namespace htdbu {

std::string_view to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::Accept: return "Accept";
    case SignalKind::RetrainModel: return "RetrainModel";
    case SignalKind::AdjustConstraints: return "AdjustConstraints";
  }
  return "?";
}

std::string_view to_string(Action action) {
  return action == Action::Refit ? "refit" : "repair_sentiment";
}

Signal decide_signal(const EvalReport& report, const ConstraintReport& constraints, const RuleSpec& rule) {
  if (!report.xmodal) throw Error(ErrorKind::MissingXModal, "report carries no xmodal value");
  if (constraints.violation_rate > rule.thresholds.violation_max) {
    return {SignalKind::AdjustConstraints,
            SignalCause{"violation_rate", constraints.violation_rate, rule.thresholds.violation_max}};
  }
  if (*report.xmodal > rule.thresholds.xmodal_max) {
    return {SignalKind::RetrainModel, SignalCause{"xmodal", *report.xmodal, rule.thresholds.xmodal_max}};
  }
  return {SignalKind::Accept, std::nullopt};
}

namespace {

std::map<Sentiment, double> sentiment_mix(const Table& table, const RuleSpec& rule) {
  const std::size_t sj = table.schema().index_of(rule.sentiment_column);
  std::map<Sentiment, double> freq;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    if (auto s = parse_sentiment(table.label(sj, i))) freq[*s] += 1.0;
  }
  for (auto& [s, v] : freq) v /= static_cast<double>(table.rows());
  return freq;
}

}  // namespace

Table repair_sentiment(const Table& table, const RuleSpec& rule, std::uint64_t seed,
                       const std::map<Sentiment, double>& label_frequencies) {
  const std::size_t tj = table.schema().index_of(rule.target_column);
  const std::size_t sj = table.schema().index_of(rule.sentiment_column);
  ColumnSpec spec = table.schema()[sj];
  if (!spec.is_categorical() || !table.schema()[tj].is_categorical()) {
    throw Error(ErrorKind::SchemaMismatch, "target and sentiment columns must be categorical");
  }
  std::vector<std::int32_t> codes(table.codes(sj).begin(), table.codes(sj).end());

  Rng rng(derive_seed(seed, "repair"));
  std::map<std::string, std::vector<double>> weights_by_target;
  bool changed = false;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const std::string& target = table.label(tj, i);
    const auto current = parse_sentiment(table.label(sj, i));
    if (current && rule.allows(target, *current)) continue;
    auto it = weights_by_target.find(target);
    if (it == weights_by_target.end()) {
      it = weights_by_target.emplace(target, sentiment_weights(rule, target, label_frequencies)).first;
    }
    const Sentiment drawn = kAllSentiments[rng.categorical(it->second)];
    const std::string label(to_string(drawn));
    auto code = spec.category_index(label);
    if (!code) {
      spec.categories.push_back(label);
      code = spec.categories.size() - 1;
    }
    codes[i] = static_cast<std::int32_t>(*code);
    changed = true;
  }
  if (!changed) return table;
  return table.replace_column(sj, std::move(spec), Column::categorical(std::move(codes)));
}

Table repair_sentiment(const Table& table, const RuleSpec& rule, std::uint64_t seed) {
  return repair_sentiment(table, rule, seed, sentiment_mix(table, rule));
}

ReconcileResult reconcile(const Table& real_train, const Table& real_test, const RuleSpec& rule,
                          const GeneratorParams& params, const ReconcileOptions& options, std::uint64_t seed) {
  if (options.max_iterations == 0) throw Error(ErrorKind::ConfigError, "max_iterations must be at least 1");
  if (const auto findings = validate_rule(rule, real_train.schema()); !findings.empty()) {
    throw Error(ErrorKind::InvalidRule, "rule does not bind to the training table: " + findings.front().detail);
  }
  const Table fit_table = rule.text_column ? real_train.drop_column(*rule.text_column) : real_train;
  const auto frequencies = options.label_frequencies ? *options.label_frequencies : sentiment_mix(real_train, rule);
  const SynthesisRoles roles{rule.target_column, rule.sentiment_column};

  ReportOptions report_options = options.report;
  ReconcileResult result;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    TrailEntry entry;
    entry.iteration = it;
    entry.seed = derive_seed(seed, it);
    const auto model = fit_generator(fit_table, params, entry.seed, roles, options.exec);
    Table syn = sample_rows(model, options.rows, derive_seed(entry.seed, "sample"), options.exec);

    auto evaluate = [&] {
      entry.report = build_report(real_train, real_test, syn, rule.target_column, &rule, report_options);
      report_options.trtr = entry.report.trtr;
      entry.constraints = check_constraints(rule, syn);
      entry.signal = decide_signal(entry.report, entry.constraints, rule);
      entry.signals.push_back(entry.signal);
    };
    evaluate();
    if (entry.signal.kind == SignalKind::AdjustConstraints) {
      syn = repair_sentiment(syn, rule, entry.seed, frequencies);
      entry.actions.push_back(Action::RepairSentiment);
      evaluate();
    }
    if (entry.signal.kind == SignalKind::RetrainModel && it + 1 < options.max_iterations) {
      entry.actions.push_back(Action::Refit);
    }
    result.table = std::move(syn);
    result.report = entry.report;
    const bool done = entry.signal.kind == SignalKind::Accept;
    result.trail.entries.push_back(std::move(entry));
    if (done) break;
  }
  if (options.corpus) {
    result.table = attach_text(result.table, *options.corpus, rule, derive_seed(seed, "text"));
  }
  return result;
}

}  // namespace htdbu
