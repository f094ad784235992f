#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "htdbu/gbt.hpp"

using namespace htdbu;

namespace {

// Three classes by thresholds on x0, plus two noise features.
void three_class(std::size_t n, std::uint64_t seed, FeatureMatrix& x, std::vector<std::int32_t>& y) {
  Rng rng(seed);
  x = FeatureMatrix(n, 3);
  y.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < 3; ++c) x(i, c) = rng.uniform();
    y[i] = x(i, 0) < 0.3 ? 0 : (x(i, 0) < 0.7 ? 1 : 2);
  }
}

}  // namespace

TEST_CASE("default shape: 80 rounds per class, depth at most 6") {
  FeatureMatrix x;
  std::vector<std::int32_t> y;
  three_class(300, 1, x, y);
  const GbtModel m = fit_gbt(x, y, 3, GbtParams{}, 2);
  REQUIRE(m.trees.size() == 3);
  for (const auto& seq : m.trees) {
    CHECK(seq.size() == 80);
    for (const auto& t : seq) CHECK(t.depth() <= 6);
  }
  CHECK(m.base_score.size() == 3);
}

TEST_CASE("separable data is learned") {
  FeatureMatrix x;
  std::vector<std::int32_t> y;
  three_class(200, 3, x, y);
  const GbtModel m = fit_gbt(x, y, 3, GbtParams{}, 4);
  std::size_t correct = 0;
  std::vector<double> row(3);
  for (std::size_t i = 0; i < 200; ++i) {
    x.row(i, row);
    correct += m.predict(row) == y[i];
  }
  CHECK(static_cast<double>(correct) / 200.0 >= 0.99);
}

TEST_CASE("probabilities form a distribution everywhere") {
  FeatureMatrix x;
  std::vector<std::int32_t> y;
  three_class(300, 5, x, y);
  const GbtModel m = fit_gbt(x, y, 3, GbtParams{}, 6);
  Rng rng(7);
  std::vector<double> row(3);
  for (int i = 0; i < 10000; ++i) {
    for (auto& v : row) v = rng.uniform() * 4.0 - 2.0;
    const auto p = m.predict_proba(row);
    CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) <= 1e-12);
    for (double q : p) {
      CHECK(q >= 0.0);
      CHECK(q <= 1.0);
    }
  }
}

TEST_CASE("single class training data") {
  FeatureMatrix x;
  std::vector<std::int32_t> y;
  three_class(50, 8, x, y);
  std::fill(y.begin(), y.end(), 1);
  const GbtModel m = fit_gbt(x, y, 3, GbtParams{}, 9);
  REQUIRE(m.constant_class.has_value());
  CHECK(*m.constant_class == 1);
  std::vector<double> row{0.1, 0.2, 0.3};
  CHECK(m.predict_proba(row) == std::vector<double>{0.0, 1.0, 0.0});
  CHECK(m.predict(row) == 1.0);
}

TEST_CASE("per-class parallelism does not change the model") {
  FeatureMatrix x;
  std::vector<std::int32_t> y;
  three_class(400, 10, x, y);
  GbtParams p;
  p.n_rounds = 20;
  const auto a = fit_gbt(x, y, 3, p, 11, Exec::Parallel);
  const auto b = fit_gbt(x, y, 3, p, 11, Exec::Serial);
  CHECK(a == b);
  CHECK(a == fit_gbt(x, y, 3, p, 11, Exec::Parallel));
}

TEST_CASE("regression boosting fits a smooth target") {
  Rng rng(12);
  const std::size_t n = 500;
  FeatureMatrix x(n, 1);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = rng.uniform() * 6.0;
    y[i] = std::sin(x(i, 0)) + 0.05 * rng.normal();
  }
  const GbtModel m = fit_gbt(x, y, GbtParams{}, 13);
  CHECK(m.task == TreeTask::Regression);
  CHECK(m.residuals.size() == n);
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = m.predict(std::vector<double>{x(i, 0)});
    sse += (r - y[i]) * (r - y[i]);
    CHECK(std::abs((y[i] - r) - m.residuals[i]) <= 1e-9);
  }
  CHECK(sse / static_cast<double>(n) < 0.01);
  CHECK(m == fit_gbt(x, y, GbtParams{}, 13));
}
