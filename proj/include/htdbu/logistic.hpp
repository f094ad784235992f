#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "htdbu/linalg.hpp"
#include "htdbu/parallel.hpp"
#include "htdbu/table.hpp"

namespace htdbu {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct LogisticParams {
  std::size_t iterations = 500;
  double step = 0.1;
  double l2 = 1e-4;
  bool operator==(const LogisticParams&) const = default;
};

// Training-table preprocessing: numeric columns standardized, categorical
// columns one-hot over the labels seen in training. Columns are matched by
// name and categories by label, so a table with a different category order
// encodes consistently. Unseen labels encode as an all-zero block.
struct FeatureEncoder {
  struct Block {
    std::string column;
    ColumnKind kind = ColumnKind::Numeric;
    double mean = 0.0;
    double scale = 0.0;  // 1/std, or 0 for a constant column
    std::vector<std::string> labels;
    std::size_t offset = 0;
    bool operator==(const Block&) const = default;
  };
  std::vector<Block> blocks;
  std::size_t dim = 0;

  static FeatureEncoder fit(const Table& table, std::span<const std::string> excluded);
  // Row-major n x dim. Throws SchemaMismatch when a column is missing or has
  // the wrong kind.
  RowMatrix encode(const Table& table) const;
  bool operator==(const FeatureEncoder&) const = default;
};

struct LogisticModel {
  std::string target;
  std::string positive_label;
  FeatureEncoder encoder;
  std::vector<double> weights;
  double bias = 0.0;
  std::optional<double> constant;  // single-class training data: the prior
  std::vector<double> loss_history;  // objective before the first and after every step

  std::vector<double> predict_proba(const Table& table) const;
};

struct LogisticObjective {
  double loss = 0.0;
  Vector grad_w;
  double grad_b = 0.0;
};

// Objective and gradient at (w, b). Rows are reduced in fixed blocks and the
// block partials summed in order, so Serial and Parallel agree bitwise.
LogisticObjective logistic_objective(const RowMatrix& x, std::span<const double> y, const Vector& w, double b,
                                     double l2, Exec exec);

// Positive class for a binary target: `explicit_label` when given, else "1"
// when present, else the less frequent category. Throws NonBinaryTarget.
std::string resolve_positive_label(const Table& table, const std::string& target,
                                   const std::optional<std::string>& explicit_label = std::nullopt);

// Full-batch gradient descent on sum_i logloss_i + l2/2 |w|^2 (the bias is
// not penalized). When a step would increase the objective the step size is
// halved until it does not, and stays halved for the remaining iterations.
// Throws NonBinaryTarget, EmptyInput.
LogisticModel fit_logistic(const Table& table, const std::string& target, const LogisticParams& params = {},
                           const std::optional<std::string>& positive_label = std::nullopt,
                           std::span<const std::string> excluded = {}, Exec exec = Exec::Parallel);

}  // namespace htdbu
