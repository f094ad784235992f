#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "htdbu/parallel.hpp"
#include "htdbu/tree.hpp"

namespace htdbu {

struct ForestParams {
  std::size_t n_trees = 30;
  int max_depth = 12;
  std::size_t min_leaf = 2;
  // Per-split feature subsample; unset means ceil(sqrt(d)).
  std::optional<std::size_t> max_features;
  bool operator==(const ForestParams&) const = default;
};

struct ForestModel {
  TreeTask task = TreeTask::Classification;
  std::size_t n_classes = 0;
  std::size_t n_features = 0;
  std::vector<std::uint64_t> tree_seeds;
  std::vector<TreeModel> trees;

  // Mean of per-tree leaf class frequencies.
  std::vector<double> predict_proba(std::span<const double> x) const;
  // Mean of per-tree leaf means.
  double predict(std::span<const double> x) const;
  // One stored training target from the leaf of a uniformly chosen tree.
  double sample_value(std::span<const double> x, Rng& rng) const;

  bool operator==(const ForestModel&) const = default;
};

// Bootstrap-aggregated CART trees. Tree t uses its own RNG stream derived
// from (seed, t), so Exec::Parallel matches Exec::Serial exactly.
ForestModel fit_forest(const FeatureMatrix& x, std::span<const std::int32_t> y, std::size_t n_classes,
                       const ForestParams& params, std::uint64_t seed, Exec exec = Exec::Parallel);
ForestModel fit_forest(const FeatureMatrix& x, std::span<const double> y, const ForestParams& params,
                       std::uint64_t seed, Exec exec = Exec::Parallel);

}  // namespace htdbu
