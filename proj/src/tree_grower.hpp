#pragma once

// Shared split search for trees, forests and boosting. Not installed.

#include <cstdint>
#include <span>
#include <vector>

#include "htdbu/rng.hpp"
#include "htdbu/tree.hpp"

namespace htdbu::detail {

// For every feature, positions into the sample list ordered by feature value
// (ties by position). Each tree node owns the same [begin, end) range in every
// list.
struct SortedIndex {
  std::vector<std::vector<std::uint32_t>> by_feature;
};

SortedIndex presort(const FeatureMatrix& x, std::span<const std::size_t> rows);

struct GrowTarget {
  TreeTask task = TreeTask::Classification;
  std::size_t n_classes = 0;
  std::span<const std::int32_t> classes;  // per sample position
  std::span<const double> values;         // per sample position
  bool store_samples = false;             // regression leaves keep their targets
};

struct GrowResult {
  TreeModel tree;
  std::vector<std::int32_t> leaf_of_position;  // node id per sample position
};

// `index` is consumed (partitioned in place).
GrowResult grow_tree(const FeatureMatrix& x, std::span<const std::size_t> rows, SortedIndex index,
                     const GrowTarget& target, const TreeParams& params, Rng& rng);

}  // namespace htdbu::detail
