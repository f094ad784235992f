#include "htdbu/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "htdbu/error.hpp"
#include "tree_grower.hpp"

namespace htdbu {

std::vector<double> GbtModel::raw_scores(std::span<const double> x) const {
  std::vector<double> f = base_score;
  for (std::size_t k = 0; k < trees.size(); ++k) {
    double s = 0.0;
    for (const auto& tree : trees[k]) s += tree.leaf_for(x).value;
    f[k] += params.learning_rate * s;
  }
  return f;
}

namespace {

void softmax_inplace(std::span<double> f) {
  const double m = *std::max_element(f.begin(), f.end());
  double z = 0.0;
  for (auto& v : f) {
    v = std::exp(v - m);
    z += v;
  }
  for (auto& v : f) v /= z;
}

}  // namespace

std::vector<double> GbtModel::predict_proba(std::span<const double> x) const {
  if (constant_class) {
    std::vector<double> p(n_classes, 0.0);
    p[static_cast<std::size_t>(*constant_class)] = 1.0;
    return p;
  }
  auto f = raw_scores(x);
  softmax_inplace(f);
  return f;
}

double GbtModel::predict(std::span<const double> x) const {
  if (task == TreeTask::Regression) return raw_scores(x).front();
  const auto p = predict_proba(x);
  return static_cast<double>(std::max_element(p.begin(), p.end()) - p.begin());
}

GbtModel fit_gbt(const FeatureMatrix& x, std::span<const std::int32_t> y, std::size_t n_classes,
                 const GbtParams& params, std::uint64_t seed, Exec exec) {
  const std::size_t n = y.size();
  if (n == 0 || x.rows() != n) throw Error(ErrorKind::EmptyInput, "fit_gbt needs matching, non-empty X and y");

  GbtModel model;
  model.task = TreeTask::Classification;
  model.n_classes = n_classes;
  model.n_features = x.cols();
  model.params = params;

  std::vector<double> counts(n_classes, 0.0);
  for (auto c : y) counts[static_cast<std::size_t>(c)] += 1.0;
  const auto present = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; });
  if (present <= 1) {
    model.constant_class = y.front();
    model.base_score.assign(n_classes, 0.0);
    model.trees.assign(n_classes, {});
    return model;
  }
  for (double c : counts) model.base_score.push_back(std::log(std::max(c / static_cast<double>(n), 1e-12)));
  model.trees.assign(n_classes, {});
  for (auto& seq : model.trees) seq.reserve(params.n_rounds);

  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const detail::SortedIndex sorted = detail::presort(x, rows);
  TreeParams tree_params{params.max_depth, params.min_leaf, 0};

  std::vector<double> scores(n * n_classes);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(model.base_score.begin(), model.base_score.end(), scores.begin() + static_cast<std::ptrdiff_t>(i * n_classes));
  }
  std::vector<double> prob(n * n_classes);
  std::vector<std::vector<double>> grad(n_classes, std::vector<double>(n));
  std::vector<std::vector<double>> hess(n_classes, std::vector<double>(n));
  std::vector<std::vector<double>> delta(n_classes, std::vector<double>(n));
  std::vector<TreeModel> round_trees(n_classes);

  for (std::size_t round = 0; round < params.n_rounds; ++round) {
    prob = scores;
    for (std::size_t i = 0; i < n; ++i) softmax_inplace({prob.data() + i * n_classes, n_classes});

    for_each_index(n_classes, exec, [&](std::size_t k) {
      auto& g = grad[k];
      auto& h = hess[k];
      for (std::size_t i = 0; i < n; ++i) {
        const double p = prob[i * n_classes + k];
        g[i] = (y[i] == static_cast<std::int32_t>(k) ? 1.0 : 0.0) - p;
        h[i] = p * (1.0 - p);
      }
      Rng rng(derive_seed(seed, round * n_classes + k));
      detail::GrowTarget target{TreeTask::Regression, 0, {}, g, false};
      auto grown = detail::grow_tree(x, rows, sorted, target, tree_params, rng);

      std::vector<double> gsum(grown.tree.nodes.size(), 0.0), hsum(grown.tree.nodes.size(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto leaf = static_cast<std::size_t>(grown.leaf_of_position[i]);
        gsum[leaf] += g[i];
        hsum[leaf] += h[i];
      }
      for (std::size_t id = 0; id < grown.tree.nodes.size(); ++id) {
        if (grown.tree.nodes[id].is_leaf()) grown.tree.nodes[id].value = gsum[id] / (hsum[id] + params.l2);
      }
      for (std::size_t i = 0; i < n; ++i) {
        delta[k][i] = params.learning_rate * grown.tree.nodes[static_cast<std::size_t>(grown.leaf_of_position[i])].value;
      }
      round_trees[k] = std::move(grown.tree);
    });

    for (std::size_t k = 0; k < n_classes; ++k) {
      for (std::size_t i = 0; i < n; ++i) scores[i * n_classes + k] += delta[k][i];
      model.trees[k].push_back(std::move(round_trees[k]));
    }
  }
  return model;
}

GbtModel fit_gbt(const FeatureMatrix& x, std::span<const double> y, const GbtParams& params,
                 std::uint64_t seed) {
  const std::size_t n = y.size();
  if (n == 0 || x.rows() != n) throw Error(ErrorKind::EmptyInput, "fit_gbt needs matching, non-empty X and y");

  GbtModel model;
  model.task = TreeTask::Regression;
  model.n_classes = 0;
  model.n_features = x.cols();
  model.params = params;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  model.base_score = {mean};
  model.trees.assign(1, {});

  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const detail::SortedIndex sorted = detail::presort(x, rows);
  TreeParams tree_params{params.max_depth, params.min_leaf, 0};

  std::vector<double> fitted(n, mean);
  std::vector<double> residual(n);
  for (std::size_t round = 0; round < params.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - fitted[i];
    Rng rng(derive_seed(seed, round));
    detail::GrowTarget target{TreeTask::Regression, 0, {}, residual, false};
    auto grown = detail::grow_tree(x, rows, sorted, target, tree_params, rng);
    for (std::size_t i = 0; i < n; ++i) {
      fitted[i] += params.learning_rate * grown.tree.nodes[static_cast<std::size_t>(grown.leaf_of_position[i])].value;
    }
    model.trees[0].push_back(std::move(grown.tree));
  }
  model.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) model.residuals[i] = y[i] - fitted[i];
  return model;
}

}  // namespace htdbu
