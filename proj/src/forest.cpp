#include "htdbu/forest.hpp"

#include <cmath>

#include "htdbu/error.hpp"
#include "tree_grower.hpp"

namespace htdbu {

std::vector<double> ForestModel::predict_proba(std::span<const double> x) const {
  std::vector<double> out(n_classes, 0.0);
  for (const auto& tree : trees) {
    const auto& leaf = tree.leaf_for(x);
    double total = 0.0;
    for (double c : leaf.class_counts) total += c;
    for (std::size_t k = 0; k < n_classes; ++k) out[k] += leaf.class_counts[k] / total;
  }
  for (auto& p : out) p /= static_cast<double>(trees.size());
  return out;
}

double ForestModel::predict(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& tree : trees) s += tree.leaf_for(x).value;
  return s / static_cast<double>(trees.size());
}

double ForestModel::sample_value(std::span<const double> x, Rng& rng) const {
  const auto& leaf = trees[rng.index(trees.size())].leaf_for(x);
  if (leaf.samples.empty()) return leaf.value;
  return leaf.samples[rng.index(leaf.samples.size())];
}

namespace {

template <class Label>
ForestModel fit_forest_impl(const FeatureMatrix& x, std::span<const Label> y, TreeTask task,
                            std::size_t n_classes, const ForestParams& params, std::uint64_t seed, Exec exec) {
  const std::size_t n = y.size();
  if (n == 0 || x.rows() != n) throw Error(ErrorKind::EmptyInput, "fit_forest needs matching, non-empty X and y");
  if (params.n_trees == 0) throw Error(ErrorKind::EmptyInput, "forest needs at least one tree");

  ForestModel model;
  model.task = task;
  model.n_classes = n_classes;
  model.n_features = x.cols();
  model.trees.resize(params.n_trees);
  model.tree_seeds.resize(params.n_trees);

  TreeParams tree_params;
  tree_params.max_depth = params.max_depth;
  tree_params.min_leaf = params.min_leaf;
  tree_params.max_features = params.max_features
                                 ? *params.max_features
                                 : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(x.cols()))));

  for (std::size_t t = 0; t < params.n_trees; ++t) model.tree_seeds[t] = derive_seed(seed, t);

  for_each_index(params.n_trees, exec, [&](std::size_t t) {
    Rng rng(model.tree_seeds[t]);
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) r = rng.index(n);
    std::vector<Label> labels(n);
    for (std::size_t p = 0; p < n; ++p) labels[p] = y[rows[p]];

    detail::GrowTarget target;
    target.task = task;
    target.n_classes = n_classes;
    if constexpr (std::is_same_v<Label, std::int32_t>) {
      target.classes = labels;
    } else {
      target.values = labels;
      target.store_samples = true;
    }
    model.trees[t] = detail::grow_tree(x, rows, detail::presort(x, rows), target, tree_params, rng).tree;
  });
  return model;
}

}  // namespace

ForestModel fit_forest(const FeatureMatrix& x, std::span<const std::int32_t> y, std::size_t n_classes,
                       const ForestParams& params, std::uint64_t seed, Exec exec) {
  return fit_forest_impl<std::int32_t>(x, y, TreeTask::Classification, n_classes, params, seed, exec);
}

ForestModel fit_forest(const FeatureMatrix& x, std::span<const double> y, const ForestParams& params,
                       std::uint64_t seed, Exec exec) {
  return fit_forest_impl<double>(x, y, TreeTask::Regression, 0, params, seed, exec);
}

}  // namespace htdbu
