#include "htdbu/tree.hpp"

#include <algorithm>
#include <numeric>

#include "htdbu/error.hpp"
#include "tree_grower.hpp"

namespace htdbu {

const TreeNode& TreeModel::leaf_for(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i];
}

int TreeModel::depth() const {
  if (nodes.empty()) return 0;
  int best = 0;
  std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (!nodes[i].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes[i].right), d + 1);
    }
  }
  return best;
}

std::size_t TreeModel::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

namespace detail {

SortedIndex presort(const FeatureMatrix& x, std::span<const std::size_t> rows) {
  SortedIndex index;
  index.by_feature.resize(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& list = index.by_feature[f];
    list.resize(rows.size());
    std::iota(list.begin(), list.end(), 0u);
    const auto col = x.column(f);
    std::sort(list.begin(), list.end(), [&](std::uint32_t a, std::uint32_t b) {
      const double va = col[rows[a]], vb = col[rows[b]];
      return va < vb || (va == vb && a < b);
    });
  }
  return index;
}

namespace {

class Grower {
 public:
  Grower(const FeatureMatrix& x, std::span<const std::size_t> rows, SortedIndex index,
         const GrowTarget& target, const TreeParams& params, Rng& rng)
      : x_(x), rows_(rows), index_(std::move(index)), target_(target), params_(params), rng_(rng) {
    goes_left_.assign(rows.size(), 0);
    buffer_.resize(rows.size());
    leaf_of_.assign(rows.size(), -1);
    features_.resize(x.cols());
    k_ = target.task == TreeTask::Classification ? target.n_classes : 0;
    left_counts_.resize(k_);
    total_counts_.resize(k_);
  }

  GrowResult run() {
    TreeModel tree;
    tree.task = target_.task;
    tree.n_classes = target_.n_classes;
    tree.params = params_;
    nodes_ = &tree.nodes;
    grow(0, rows_.size(), 0);
    return GrowResult{std::move(tree), std::move(leaf_of_)};
  }

 private:
  struct Split {
    bool found = false;
    std::size_t feature = 0;
    std::size_t left_size = 0;
    double threshold = 0.0;
  };

  double value_at(std::size_t feature, std::uint32_t pos) const { return x_(rows_[pos], feature); }

  std::span<const std::size_t> candidate_features() {
    const std::size_t d = x_.cols();
    std::iota(features_.begin(), features_.end(), std::size_t{0});
    const std::size_t m = (params_.max_features == 0 || params_.max_features >= d) ? d : params_.max_features;
    if (m < d) {
      for (std::size_t i = 0; i < m; ++i) std::swap(features_[i], features_[i + rng_.index(d - i)]);
    }
    return {features_.data(), m};
  }

  Split best_classification_split(std::size_t b, std::size_t e, double parent_sq) {
    Split best;
    const std::size_t n = e - b;
    double best_score = parent_sq / static_cast<double>(n) + 1e-10 * static_cast<double>(n);
    for (std::size_t f : candidate_features()) {
      const auto& list = index_.by_feature[f];
      std::fill(left_counts_.begin(), left_counts_.end(), 0.0);
      double left_sq = 0.0, right_sq = parent_sq;
      for (std::size_t i = b; i + 1 < e; ++i) {
        const auto c = static_cast<std::size_t>(target_.classes[list[i]]);
        const double right_c = total_counts_[c] - left_counts_[c];
        left_sq += 2.0 * left_counts_[c] + 1.0;
        right_sq -= 2.0 * right_c - 1.0;
        left_counts_[c] += 1.0;
        const std::size_t nl = i - b + 1, nr = n - nl;
        if (nl < params_.min_leaf) continue;
        if (nr < params_.min_leaf) break;
        const double v = value_at(f, list[i]), vn = value_at(f, list[i + 1]);
        if (!(v < vn)) continue;
        const double score = left_sq / static_cast<double>(nl) + right_sq / static_cast<double>(nr);
        if (score > best_score) {
          best_score = score;
          best = Split{true, f, nl, threshold_between(v, vn)};
        }
      }
    }
    return best;
  }

  Split best_regression_split(std::size_t b, std::size_t e, double mean, double total, double sse) {
    Split best;
    const std::size_t n = e - b;
    double best_score = 1e-12 * sse;
    for (std::size_t f : candidate_features()) {
      const auto& list = index_.by_feature[f];
      double sl = 0.0;
      for (std::size_t i = b; i + 1 < e; ++i) {
        sl += target_.values[list[i]] - mean;
        const std::size_t nl = i - b + 1, nr = n - nl;
        if (nl < params_.min_leaf) continue;
        if (nr < params_.min_leaf) break;
        const double v = value_at(f, list[i]), vn = value_at(f, list[i + 1]);
        if (!(v < vn)) continue;
        const double sr = total - sl;
        const double score = sl * sl / static_cast<double>(nl) + sr * sr / static_cast<double>(nr) -
                             total * total / static_cast<double>(n);
        if (score > best_score) {
          best_score = score;
          best = Split{true, f, nl, threshold_between(v, vn)};
        }
      }
    }
    return best;
  }

  static double threshold_between(double v, double vn) {
    double t = v + (vn - v) / 2.0;
    if (!(t < vn)) t = v;
    return t;
  }

  std::int32_t make_leaf(std::size_t b, std::size_t e) {
    const auto id = static_cast<std::int32_t>(nodes_->size());
    TreeNode leaf;
    const auto& list = index_.by_feature.empty() ? buffer_ : index_.by_feature[0];
    const double n = static_cast<double>(e - b);
    if (target_.task == TreeTask::Classification) {
      leaf.class_counts.assign(k_, 0.0);
      for (std::size_t i = b; i < e; ++i) leaf.class_counts[static_cast<std::size_t>(target_.classes[list[i]])] += 1.0;
    } else {
      double s = 0.0;
      for (std::size_t i = b; i < e; ++i) s += target_.values[list[i]];
      leaf.value = s / n;
      if (target_.store_samples) {
        // keep sample order independent of which feature list we read
        std::vector<std::uint32_t> positions(list.begin() + static_cast<std::ptrdiff_t>(b),
                                             list.begin() + static_cast<std::ptrdiff_t>(e));
        std::sort(positions.begin(), positions.end());
        leaf.samples.reserve(positions.size());
        for (auto p : positions) leaf.samples.push_back(target_.values[p]);
      }
    }
    for (std::size_t i = b; i < e; ++i) leaf_of_[list[i]] = id;
    nodes_->push_back(std::move(leaf));
    return id;
  }

  std::int32_t grow(std::size_t b, std::size_t e, int depth) {
    const std::size_t n = e - b;
    const bool can_split = depth < params_.max_depth && n >= 2 * std::max<std::size_t>(params_.min_leaf, 1) &&
                           x_.cols() > 0;
    if (!can_split) return make_leaf(b, e);

    const auto& list0 = index_.by_feature[0];
    Split split;
    if (target_.task == TreeTask::Classification) {
      std::fill(total_counts_.begin(), total_counts_.end(), 0.0);
      for (std::size_t i = b; i < e; ++i) total_counts_[static_cast<std::size_t>(target_.classes[list0[i]])] += 1.0;
      double sq = 0.0;
      std::size_t present = 0;
      for (double c : total_counts_) {
        sq += c * c;
        present += c > 0.0;
      }
      if (present <= 1) return make_leaf(b, e);
      split = best_classification_split(b, e, sq);
    } else {
      double s = 0.0;
      for (std::size_t i = b; i < e; ++i) s += target_.values[list0[i]];
      const double mean = s / static_cast<double>(n);
      double sse = 0.0, centered = 0.0;
      for (std::size_t i = b; i < e; ++i) {
        const double d = target_.values[list0[i]] - mean;
        sse += d * d;
        centered += d;
      }
      if (sse == 0.0) return make_leaf(b, e);
      split = best_regression_split(b, e, mean, centered, sse);
    }
    if (!split.found) return make_leaf(b, e);

    // partition every feature list, preserving order within each side
    const auto& chosen = index_.by_feature[split.feature];
    for (std::size_t i = b; i < e; ++i) goes_left_[chosen[i]] = (i < b + split.left_size) ? 1 : 0;
    for (auto& list : index_.by_feature) {
      std::size_t l = b, r = 0;
      for (std::size_t i = b; i < e; ++i) {
        if (goes_left_[list[i]]) {
          list[l++] = list[i];
        } else {
          buffer_[r++] = list[i];
        }
      }
      std::copy(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(r),
                list.begin() + static_cast<std::ptrdiff_t>(l));
    }

    const auto id = static_cast<std::int32_t>(nodes_->size());
    TreeNode node;
    node.feature = static_cast<std::int32_t>(split.feature);
    node.threshold = split.threshold;
    nodes_->push_back(std::move(node));
    const std::size_t mid = b + split.left_size;
    const auto left = grow(b, mid, depth + 1);
    const auto right = grow(mid, e, depth + 1);
    (*nodes_)[static_cast<std::size_t>(id)].left = left;
    (*nodes_)[static_cast<std::size_t>(id)].right = right;
    return id;
  }

  const FeatureMatrix& x_;
  std::span<const std::size_t> rows_;
  SortedIndex index_;
  const GrowTarget& target_;
  TreeParams params_;
  Rng& rng_;
  std::vector<TreeNode>* nodes_ = nullptr;
  std::vector<char> goes_left_;
  std::vector<std::uint32_t> buffer_;
  std::vector<std::int32_t> leaf_of_;
  std::vector<std::size_t> features_;
  std::size_t k_ = 0;
  std::vector<double> left_counts_;
  std::vector<double> total_counts_;
};

}  // namespace

GrowResult grow_tree(const FeatureMatrix& x, std::span<const std::size_t> rows, SortedIndex index,
                     const GrowTarget& target, const TreeParams& params, Rng& rng) {
  if (rows.empty()) throw Error(ErrorKind::EmptyInput, "cannot grow a tree on zero samples");
  if (index.by_feature.empty()) {
    // no features: a single leaf over all positions
    index.by_feature.emplace_back(rows.size());
    std::iota(index.by_feature[0].begin(), index.by_feature[0].end(), 0u);
    FeatureMatrix none(x.rows(), 0);
    Grower g(none, rows, std::move(index), target, params, rng);
    return g.run();
  }
  Grower g(x, rows, std::move(index), target, params, rng);
  return g.run();
}

}  // namespace detail

TreeModel fit_tree(const FeatureMatrix& x, std::span<const std::int32_t> y, std::size_t n_classes,
                   const TreeParams& params, Rng& rng) {
  if (y.empty() || x.rows() != y.size()) throw Error(ErrorKind::EmptyInput, "fit_tree needs matching, non-empty X and y");
  std::vector<std::size_t> rows(y.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  detail::GrowTarget target{TreeTask::Classification, n_classes, y, {}, false};
  return detail::grow_tree(x, rows, detail::presort(x, rows), target, params, rng).tree;
}

TreeModel fit_tree(const FeatureMatrix& x, std::span<const double> y, const TreeParams& params, Rng& rng) {
  if (y.empty() || x.rows() != y.size()) throw Error(ErrorKind::EmptyInput, "fit_tree needs matching, non-empty X and y");
  std::vector<std::size_t> rows(y.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  detail::GrowTarget target{TreeTask::Regression, 0, {}, y, true};
  return detail::grow_tree(x, rows, detail::presort(x, rows), target, params, rng).tree;
}

}  // namespace htdbu
