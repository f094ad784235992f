#include "htdbu/copula.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "htdbu/error.hpp"
#include "htdbu/rng.hpp"

namespace htdbu {

namespace {

std::vector<double> numeric_scores(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t k = i;
    while (k + 1 < n && values[order[k + 1]] == values[order[i]]) ++k;
    const double rank = 0.5 * static_cast<double>(i + k) + 1.0;  // 1-based average rank
    const double z = inv_normal_cdf((rank - 0.5) / static_cast<double>(n));
    for (std::size_t t = i; t <= k; ++t) scores[order[t]] = z;
    i = k + 1;
  }
  return scores;
}

}  // namespace

CopulaModel fit_copula(const Table& table) {
  const std::size_t n = table.rows();
  const std::size_t d = table.cols();
  if (n < 2 || d == 0) throw Error(ErrorKind::EmptyInput, "copula needs at least two rows and one column");

  CopulaModel model;
  model.schema = table.schema();
  model.marginals.resize(d);
  Matrix scores(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));

  for (std::size_t j = 0; j < d; ++j) {
    auto& m = model.marginals[j];
    m.kind = table.schema()[j].kind;
    std::vector<double> s;
    if (m.kind == ColumnKind::Numeric) {
      const auto v = table.numeric(j);
      m.sorted.assign(v.begin(), v.end());
      std::sort(m.sorted.begin(), m.sorted.end());
      m.constant = m.sorted.front() == m.sorted.back();
      s = numeric_scores(v);
    } else {
      const std::size_t k = table.schema()[j].categories.size();
      std::vector<double> counts(k, 0.0);
      for (auto c : table.codes(j)) counts[static_cast<std::size_t>(c)] += 1.0;
      m.cuts.assign(k + 1, 0.0);
      for (std::size_t c = 0; c < k; ++c) m.cuts[c + 1] = m.cuts[c] + counts[c] / static_cast<double>(n);
      m.cuts[k] = 1.0;
      m.constant = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) == 1;
      s.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(table.codes(j)[i]);
        s[i] = inv_normal_cdf(0.5 * (m.cuts[c] + m.cuts[c + 1]));
      }
    }
    for (std::size_t i = 0; i < n; ++i) scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s[i];
  }

  Matrix centered = scores.rowwise() - scores.colwise().mean();
  Matrix cov = centered.transpose() * centered;
  Matrix corr = Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index a = 0; a < corr.rows(); ++a) {
    for (Eigen::Index b = 0; b < a; ++b) {
      if (model.marginals[static_cast<std::size_t>(a)].constant || model.marginals[static_cast<std::size_t>(b)].constant) {
        continue;
      }
      const double r = cov(a, b) / std::sqrt(cov(a, a) * cov(b, b));
      corr(a, b) = corr(b, a) = std::clamp(r, -1.0, 1.0);
    }
  }
  model.correlation = repair_correlation(corr);
  model.factor = cholesky(model.correlation);
  return model;
}

namespace {

double numeric_inverse(const std::vector<double>& sorted, double u) {
  const std::size_t n = sorted.size();
  const double h = std::clamp(u * static_cast<double>(n) - 0.5, 0.0, static_cast<double>(n - 1));
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::int32_t categorical_inverse(const std::vector<double>& cuts, double u) {
  // first interval whose upper boundary exceeds u; empty intervals are skipped
  const auto it = std::upper_bound(cuts.begin() + 1, cuts.end() - 1, u);
  return static_cast<std::int32_t>(it - (cuts.begin() + 1));
}

}  // namespace

Table sample_copula(const CopulaModel& model, std::size_t n, std::uint64_t seed, Exec exec) {
  const std::size_t d = model.marginals.size();
  std::vector<Column> columns(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (model.marginals[j].kind == ColumnKind::Numeric) {
      columns[j].values.resize(n);
    } else {
      columns[j].codes.resize(n);
    }
  }

  for_each_index(block_count(n), exec, [&](std::size_t blk) {
    Rng rng(derive_seed(seed, blk));
    Vector eps(static_cast<Eigen::Index>(d));
    const std::size_t end = std::min(n, (blk + 1) * kRowBlock);
    for (std::size_t i = blk * kRowBlock; i < end; ++i) {
      for (Eigen::Index j = 0; j < eps.size(); ++j) eps(j) = rng.normal();
      const Vector z = model.factor.triangularView<Eigen::Lower>() * eps;
      for (std::size_t j = 0; j < d; ++j) {
        const auto& m = model.marginals[j];
        const double u = normal_cdf(z(static_cast<Eigen::Index>(j)));
        if (m.kind == ColumnKind::Numeric) {
          columns[j].values[i] = numeric_inverse(m.sorted, u);
        } else {
          columns[j].codes[i] = categorical_inverse(m.cuts, u);
        }
      }
    }
  });
  return Table(model.schema, std::move(columns));
}

}  // namespace htdbu
