#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "htdbu/rng.hpp"

namespace htdbu {

// Dense column-major feature matrix. Categorical features are carried as
// their integer codes.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
  std::span<const double> column(std::size_t c) const { return {data_.data() + c * rows_, rows_}; }
  void row(std::size_t r, std::span<double> out) const {
    for (std::size_t c = 0; c < cols_; ++c) out[c] = (*this)(r, c);
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class TreeTask { Classification, Regression };

struct TreeParams {
  int max_depth = 12;
  std::size_t min_leaf = 2;
  // Features examined per split; 0 means all of them.
  std::size_t max_features = 0;
  bool operator==(const TreeParams&) const = default;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // rows with x <= threshold go left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;                 // leaf mean, or boosting leaf weight
  std::vector<double> class_counts;   // classification leaves
  std::vector<double> samples;        // regression leaves: training targets that landed here

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct TreeModel {
  TreeTask task = TreeTask::Classification;
  std::size_t n_classes = 0;
  TreeParams params;
  std::vector<TreeNode> nodes;  // nodes[0] is the root, preorder

  const TreeNode& leaf_for(std::span<const double> x) const;
  // Longest root-to-leaf path, in edges.
  int depth() const;
  std::size_t leaf_count() const;
  bool operator==(const TreeModel&) const = default;
};

// CART classification tree on Gini impurity. Throws EmptyInput.
TreeModel fit_tree(const FeatureMatrix& x, std::span<const std::int32_t> y, std::size_t n_classes,
                   const TreeParams& params, Rng& rng);

// CART regression tree on squared error; leaves keep their training targets.
TreeModel fit_tree(const FeatureMatrix& x, std::span<const double> y, const TreeParams& params, Rng& rng);

}  // namespace htdbu
