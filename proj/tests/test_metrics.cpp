#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "htdbu/metrics.hpp"

using namespace htdbu;

namespace {

Table categorical(const std::string& name, std::vector<std::string> categories, std::vector<std::int32_t> codes) {
  return Table(Schema({{name, ColumnKind::Categorical, std::move(categories)}}), {Column::categorical(std::move(codes))});
}

Table joint(std::vector<std::int32_t> y, std::vector<std::int32_t> s) {
  return Table(Schema({{"y", ColumnKind::Categorical, {"0", "1"}},
                       {"sentiment", ColumnKind::Categorical, {"negative", "positive"}}}),
               {Column::categorical(std::move(y)), Column::categorical(std::move(s))});
}

// Brute-force Mann-Whitney: fraction of (pos, neg) pairs ordered correctly, ties 1/2.
double auroc_oracle(const std::vector<int>& y, const std::vector<double>& s) {
  double good = 0, pairs = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1;
        good += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  return good / pairs;
}

}  // namespace

TEST_CASE("AUROC oracles") {
  const std::vector<int> perfect{1, 1, 0, 0};
  CHECK(classification_scores(perfect, std::vector<double>{0.9, 0.8, 0.3, 0.2}).auroc == 1.0);
  const std::vector<int> alternating{1, 0, 1, 0};
  CHECK(std::abs(classification_scores(alternating, std::vector<double>{0.9, 0.8, 0.7, 0.6}).auroc - 0.75) <= 1e-12);
}

TEST_CASE("AUROC agrees with pair counting, ties included") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 20 + rng.index(60);
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.index(2));
      s[i] = static_cast<double>(rng.index(8)) / 8.0;
    }
    y[0] = 1;
    y[1] = 0;
    CHECK(std::abs(classification_scores(y, s).auroc - auroc_oracle(y, s)) <= 1e-12);
  }
}

TEST_CASE("F1 oracles") {
  // predictions (1,1,0) against truth (1,0,0): P = 1/2, R = 1
  const std::vector<int> truth{1, 0, 0};
  const auto s = classification_scores(truth, std::vector<double>{0.9, 0.7, 0.1});
  CHECK(std::abs(s.f1 - 2.0 / 3.0) <= 1e-12);
  CHECK(std::abs(s.accuracy - 2.0 / 3.0) <= 1e-12);
  const auto none = classification_scores(truth, std::vector<double>{0.2, 0.2, 0.2});
  CHECK(none.f1 == 0.0);
  // threshold is inclusive
  CHECK(classification_scores(std::vector<int>{1}, std::vector<double>{0.5}).accuracy == 1.0);
}

TEST_CASE("single-class truth is flagged") {
  const auto s = classification_scores(std::vector<int>{0, 0}, std::vector<double>{0.1, 0.9});
  CHECK(s.single_class);
  CHECK(s.auroc == 0.5);
}

TEST_CASE("length mismatch") {
  CHECK(testing::error_kind([] { classification_scores(std::vector<int>{1, 0}, std::vector<double>{0.5}); }) ==
        ErrorKind::LengthMismatch);
  CHECK(testing::error_kind([] { classification_scores(std::vector<int>{}, std::vector<double>{}); }) ==
        ErrorKind::LengthMismatch);
}

TEST_CASE("AUROC properties") {
  Rng rng(2);
  std::vector<int> y(300);
  std::vector<double> s(300), t(300), neg(300);
  for (std::size_t i = 0; i < 300; ++i) {
    y[i] = static_cast<int>(rng.index(2));
    s[i] = rng.normal() + y[i];
    t[i] = std::exp(3.0 * s[i]) + 7.0;
    neg[i] = -s[i];
  }
  const double a = classification_scores(y, s).auroc;
  CHECK(std::abs(classification_scores(y, t).auroc - a) <= 1e-12);
  CHECK(std::abs(classification_scores(y, neg).auroc + a - 1.0) <= 1e-12);
  std::vector<std::size_t> perm(300);
  for (std::size_t i = 0; i < 300; ++i) perm[i] = i;
  for (std::size_t i = 300; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
  std::vector<int> yp(300);
  std::vector<double> sp(300);
  for (std::size_t i = 0; i < 300; ++i) {
    yp[i] = y[perm[i]];
    sp[i] = s[perm[i]];
  }
  CHECK(std::abs(classification_scores(yp, sp).auroc - a) <= 1e-12);
}

TEST_CASE("categorical TVD oracles") {
  const Table half = categorical("c", {"A", "B"}, {0, 1});
  const Table all_a = categorical("c", {"A"}, {0, 0});
  CHECK(std::abs(categorical_fidelity(half, all_a) - 0.5) <= 1e-12);
  CHECK(std::abs(categorical_fidelity(all_a, half) - 0.5) <= 1e-12);
  const Table only_b = categorical("c", {"B"}, {0});
  CHECK(categorical_fidelity(all_a, only_b) == 1.0);
  CHECK(categorical_fidelity(half, half) == 0.0);
  // labels are matched by name, not by code
  CHECK(categorical_fidelity(half, categorical("c", {"B", "A"}, {1, 0})) == 0.0);
  const Table numeric(Schema({{"v", ColumnKind::Numeric, {}}}), {Column::numeric({1.0})});
  CHECK(testing::error_kind([&] { categorical_fidelity(numeric, numeric); }) == ErrorKind::NoCategoricalColumns);
}

TEST_CASE("xmodal oracle: diagonal against uniform") {
  const Table diagonal = joint({1, 0}, {1, 0});
  const Table uniform = joint({1, 1, 0, 0}, {1, 0, 1, 0});
  CHECK(std::abs(xmodal(diagonal, uniform, "y", "sentiment") - 0.5) <= 1e-12);
  CHECK(std::abs(xmodal(uniform, diagonal, "y", "sentiment") - 0.5) <= 1e-12);
  CHECK(xmodal(diagonal, diagonal, "y", "sentiment") == 0.0);
  CHECK(testing::error_kind([&] { xmodal(diagonal, uniform, "y", "mood"); }) == ErrorKind::UnknownColumn);
}

TEST_CASE("numeric fidelity oracle") {
  const Table real(Schema({{"v", ColumnKind::Numeric, {}}}), {Column::numeric({8.0, 12.0})});
  const Table syn(Schema({{"v", ColumnKind::Numeric, {}}}), {Column::numeric({10.0, 14.0})});
  const auto f = numeric_fidelity(real, syn);
  CHECK(std::abs(f.mean_diff - 2.0) <= 1e-12);
  CHECK(f.std_diff == 0.0);
  const auto same = numeric_fidelity(real, real);
  CHECK(same.mean_diff == 0.0);
  CHECK(same.std_diff == 0.0);
  const Table cat = categorical("c", {"A"}, {0});
  CHECK(testing::error_kind([&] { numeric_fidelity(cat, cat); }) == ErrorKind::NoNumericColumns);
}

TEST_CASE("fidelity metrics ignore row order") {
  const Table t = testing::weak_benchmark(BuiltinRule::Manual, 3);
  std::vector<std::size_t> rows(t.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = rows.size() - 1 - i;
  const Table r = t.select_rows(rows);
  const Table half = t.select_rows(std::span<const std::size_t>(rows).first(1000));
  const auto a = numeric_fidelity(t, half), b = numeric_fidelity(r, half);
  CHECK(std::abs(a.mean_diff - b.mean_diff) <= 1e-9);
  CHECK(std::abs(a.std_diff - b.std_diff) <= 1e-9);
  CHECK(std::abs(categorical_fidelity(t, half) - categorical_fidelity(r, half)) <= 1e-12);
  CHECK(std::abs(xmodal(t, half, "y", "sentiment") - xmodal(r, half, "y", "sentiment")) <= 1e-12);
  const double x = xmodal(t, half, "y", "sentiment");
  CHECK(x >= 0.0);
  CHECK(x <= 1.0);
}

TEST_CASE("gap identity") {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    UtilityScores a{rng.uniform(), rng.uniform(), rng.uniform()}, b{rng.uniform(), rng.uniform(), rng.uniform()};
    const auto g = utility_gap(a, b);
    CHECK(std::abs(g.accuracy - (a.accuracy - b.accuracy)) <= 1e-12);
    CHECK(std::abs(g.f1 - (a.f1 - b.f1)) <= 1e-12);
    CHECK(std::abs(g.auroc - (a.auroc - b.auroc)) <= 1e-12);
  }
}

TEST_CASE("gap reproduces the table entry from rounded and unrounded inputs") {
  const UtilityScores trtr{0.9308, 0.0, 0.5}, tstr{0.9281, 0.0, 0.5};
  // The four-decimal inputs give -0.0027; inputs that round to the same
  // four decimals reach -0.0028.
  CHECK(std::round(utility_gap(tstr, trtr).accuracy * 1e4) / 1e4 == doctest::Approx(-0.0027).epsilon(1e-12));
  const UtilityScores trtr_raw{0.93084, 0.0, 0.5}, tstr_raw{0.92805, 0.0, 0.5};
  CHECK(std::round(trtr_raw.accuracy * 1e4) / 1e4 == doctest::Approx(0.9308));
  CHECK(std::round(tstr_raw.accuracy * 1e4) / 1e4 == doctest::Approx(0.9281));
  CHECK(std::round(utility_gap(tstr_raw, trtr_raw).accuracy * 1e4) / 1e4 == doctest::Approx(-0.0028).epsilon(1e-12));
}

TEST_CASE("a synthetic copy of the training split scores zero everywhere") {
  const Table t = testing::weak_benchmark(BuiltinRule::Manual, 5);
  const auto parts = split(t, 0.25, 5, std::string("y"));
  const RuleSpec rule = builtin_rule(BuiltinRule::Manual);
  const EvalReport r = build_report(parts.train, parts.test, parts.train, "y", &rule);
  CHECK(r.gap.accuracy == 0.0);
  CHECK(r.gap.f1 == 0.0);
  CHECK(r.gap.auroc == 0.0);
  CHECK(r.numeric_mean_diff == 0.0);
  CHECK(r.numeric_std_diff == 0.0);
  CHECK(r.categorical_tvd == 0.0);
  CHECK(r.xmodal == 0.0);
  CHECK(r.trtr == r.tstr);
  const EvalReport bare = build_report(parts.train, parts.test, parts.train, "y");
  CHECK_FALSE(bare.xmodal.has_value());
}

TEST_CASE("train equals test on a separable fixture") {
  Rng rng(6);
  std::vector<double> x(200);
  std::vector<std::int32_t> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    x[i] = rng.normal();
    y[i] = x[i] > 0 ? 1 : 0;
  }
  const Table t(Schema({{"x", ColumnKind::Numeric, {}}, {"y", ColumnKind::Categorical, {"0", "1"}}}),
                {Column::numeric(x), Column::categorical(y)});
  const auto s = eval_utility(t, t, "y");
  CHECK(s.accuracy == 1.0);
  CHECK(s.auroc == 1.0);
}

TEST_CASE("gemini TRTR is perfect") {
  const Table t = testing::weak_benchmark(BuiltinRule::Gemini, 42);
  const auto parts = split(t, 0.25, 42, std::string("y"));
  const auto s = eval_utility(parts.train, parts.test, "y");
  CHECK(s.auroc >= 0.999);
  CHECK(s.f1 >= 0.999);
}
