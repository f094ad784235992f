#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "htdbu/parallel.hpp"
#include "htdbu/tree.hpp"

namespace htdbu {

struct GbtParams {
  std::size_t n_rounds = 80;
  int max_depth = 6;
  double learning_rate = 0.1;
  std::size_t min_leaf = 1;
  double l2 = 1.0;  // leaf-weight ridge term
  bool operator==(const GbtParams&) const = default;
};

// Additive tree ensemble. Classification keeps one tree sequence per class
// and predicts softmax(base + lr * sum of leaf weights); regression keeps a
// single sequence plus the pooled training residuals used for sampling.
struct GbtModel {
  TreeTask task = TreeTask::Classification;
  std::size_t n_classes = 0;
  std::size_t n_features = 0;
  GbtParams params;
  std::vector<double> base_score;
  std::vector<std::vector<TreeModel>> trees;  // [class][round]
  std::optional<std::int32_t> constant_class;  // single-class training data
  std::vector<double> residuals;

  std::vector<double> raw_scores(std::span<const double> x) const;
  std::vector<double> predict_proba(std::span<const double> x) const;
  // Regression: the fitted value. Classification: the most probable class.
  double predict(std::span<const double> x) const;

  bool operator==(const GbtModel&) const = default;
};

// Softmax log-loss boosting: each round fits one regression tree per class to
// the negative gradient y_k - p_k, with Newton leaf weights
// sum(g) / (sum(p(1-p)) + l2). Per-class trees within a round are
// independent and may be fitted concurrently.
GbtModel fit_gbt(const FeatureMatrix& x, std::span<const std::int32_t> y, std::size_t n_classes,
                 const GbtParams& params, std::uint64_t seed, Exec exec = Exec::Parallel);

// Squared-error boosting from the mean.
GbtModel fit_gbt(const FeatureMatrix& x, std::span<const double> y, const GbtParams& params,
                 std::uint64_t seed);

}  // namespace htdbu
