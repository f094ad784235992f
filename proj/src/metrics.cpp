#include "htdbu/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "htdbu/error.hpp"
#include "htdbu/summary.hpp"

namespace htdbu {

UtilityGap utility_gap(const UtilityScores& tstr, const UtilityScores& trtr) {
  return {tstr.accuracy - trtr.accuracy, tstr.f1 - trtr.f1, tstr.auroc - trtr.auroc};
}

UtilityScores classification_scores(std::span<const int> y_true, std::span<const double> scores, double threshold) {
  if (y_true.size() != scores.size() || y_true.empty()) {
    throw Error(ErrorKind::LengthMismatch, "labels and scores must have the same non-zero length");
  }
  const std::size_t n = y_true.size();
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool pred = scores[i] >= threshold;
    const bool pos = y_true[i] != 0;
    if (pred && pos) ++tp;
    else if (pred) ++fp;
    else if (pos) ++fn;
    else ++tn;
  }
  UtilityScores out;
  out.accuracy = static_cast<double>(tp + tn) / static_cast<double>(n);
  const double denom = static_cast<double>(2 * tp + fp + fn);
  out.f1 = tp == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;

  const std::size_t n_pos = tp + fn;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    out.auroc = 0.5;
    out.single_class = true;
    return out;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t k = i;
    while (k + 1 < n && scores[order[k + 1]] == scores[order[i]]) ++k;
    const double avg = 0.5 * static_cast<double>(i + k) + 1.0;
    for (std::size_t t = i; t <= k; ++t) {
      if (y_true[order[t]] != 0) rank_sum += avg;
    }
    i = k + 1;
  }
  const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  out.auroc = (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
  return out;
}

UtilityScores eval_utility(const Table& train, const Table& test, const std::string& target,
                           const UtilityOptions& options) {
  const std::string positive = resolve_positive_label(test, target, options.positive_label);
  const auto model = fit_logistic(train, target, options.logistic, positive, options.excluded);
  const auto scores = model.predict_proba(test);
  const std::size_t tj = test.schema().index_of(target);
  std::vector<int> y(test.rows());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = test.label(tj, i) == positive ? 1 : 0;
  return classification_scores(y, scores);
}

NumericFidelity numeric_fidelity(const Table& real, const Table& syn) {
  NumericFidelity out;
  std::size_t count = 0;
  for (std::size_t j = 0; j < real.cols(); ++j) {
    const auto& spec = real.schema()[j];
    if (spec.is_categorical()) continue;
    const auto k = syn.schema().find(spec.name);
    if (!k || syn.schema()[*k].is_categorical()) continue;
    const auto a = numeric_stats(real.numeric(j));
    const auto b = numeric_stats(syn.numeric(*k));
    out.mean_diff += std::abs(a.mean - b.mean);
    out.std_diff += std::abs(a.std - b.std);
    ++count;
  }
  if (count == 0) throw Error(ErrorKind::NoNumericColumns, "no shared numeric columns");
  out.mean_diff /= static_cast<double>(count);
  out.std_diff /= static_cast<double>(count);
  return out;
}

namespace {

template <class Key>
double tvd(const std::map<Key, double>& p, const std::map<Key, double>& q) {
  double s = 0.0;
  for (const auto& [k, v] : p) {
    const auto it = q.find(k);
    s += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q) {
    if (!p.contains(k)) s += v;
  }
  return 0.5 * s;
}

std::map<std::string, double> label_distribution(const Table& t, std::size_t j) {
  std::map<std::string, double> out;
  for (const auto& [label, freq] : category_distribution(t, j)) {
    if (freq > 0.0) out[label] = freq;
  }
  return out;
}

}  // namespace

double categorical_fidelity(const Table& real, const Table& syn, std::span<const std::string> excluded) {
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < real.cols(); ++j) {
    const auto& spec = real.schema()[j];
    if (!spec.is_categorical()) continue;
    if (std::find(excluded.begin(), excluded.end(), spec.name) != excluded.end()) continue;
    const auto k = syn.schema().find(spec.name);
    if (!k || !syn.schema()[*k].is_categorical()) continue;
    total += tvd(label_distribution(real, j), label_distribution(syn, *k));
    ++count;
  }
  if (count == 0) throw Error(ErrorKind::NoCategoricalColumns, "no shared categorical columns");
  return total / static_cast<double>(count);
}

double xmodal(const Table& real, const Table& syn, const std::string& target, const std::string& sentiment) {
  auto joint = [&](const Table& t) {
    const std::size_t a = t.schema().index_of(target);
    const std::size_t b = t.schema().index_of(sentiment);
    std::map<std::pair<std::string, std::string>, double> p;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      auto label = [&](std::size_t j) {
        return t.schema()[j].is_categorical() ? t.label(j, i) : format_number(t.numeric(j)[i]);
      };
      p[{label(a), label(b)}] += 1.0;
    }
    for (auto& [k, v] : p) v /= static_cast<double>(t.rows());
    return p;
  };
  return tvd(joint(real), joint(syn));
}

EvalReport build_report(const Table& real_train, const Table& real_test, const Table& syn, const std::string& target,
                        const RuleSpec* rule, const ReportOptions& options) {
  UtilityOptions utility = options.utility;
  if (rule && rule->text_column) utility.excluded.push_back(*rule->text_column);
  if (!utility.positive_label) utility.positive_label = resolve_positive_label(real_test, target);

  EvalReport report;
  report.trtr = options.trtr ? *options.trtr : eval_utility(real_train, real_test, target, utility);
  report.tstr = eval_utility(syn, real_test, target, utility);
  report.gap = utility_gap(report.tstr, report.trtr);

  try {
    const auto nf = numeric_fidelity(real_train, syn);
    report.numeric_mean_diff = nf.mean_diff;
    report.numeric_std_diff = nf.std_diff;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoNumericColumns) throw;
  }
  try {
    report.categorical_tvd = categorical_fidelity(real_train, syn, utility.excluded);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoCategoricalColumns) throw;
  }
  if (rule) report.xmodal = xmodal(real_train, syn, rule->target_column, rule->sentiment_column);
  return report;
}

}  // namespace htdbu
