#include "htdbu/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "htdbu/error.hpp"

namespace htdbu {

FeatureEncoder FeatureEncoder::fit(const Table& table, std::span<const std::string> excluded) {
  FeatureEncoder enc;
  const auto& schema = table.schema();
  const double n = static_cast<double>(table.rows());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const auto& spec = schema[j];
    if (std::find(excluded.begin(), excluded.end(), spec.name) != excluded.end()) continue;
    Block block;
    block.column = spec.name;
    block.kind = spec.kind;
    block.offset = enc.dim;
    if (spec.is_categorical()) {
      std::vector<bool> seen(spec.categories.size(), false);
      for (auto c : table.codes(j)) seen[static_cast<std::size_t>(c)] = true;
      for (std::size_t k = 0; k < seen.size(); ++k) {
        if (seen[k]) block.labels.push_back(spec.categories[k]);
      }
      enc.dim += block.labels.size();
    } else {
      double mean = 0.0;
      for (double v : table.numeric(j)) mean += v;
      mean /= n;
      double var = 0.0;
      for (double v : table.numeric(j)) var += (v - mean) * (v - mean);
      const double sd = std::sqrt(var / n);
      block.mean = mean;
      block.scale = sd > 0.0 ? 1.0 / sd : 0.0;
      enc.dim += 1;
    }
    enc.blocks.push_back(std::move(block));
  }
  return enc;
}

RowMatrix FeatureEncoder::encode(const Table& table) const {
  RowMatrix out = RowMatrix::Zero(static_cast<Eigen::Index>(table.rows()), static_cast<Eigen::Index>(dim));
  const auto& schema = table.schema();
  for (const auto& block : blocks) {
    const auto j = schema.find(block.column);
    if (!j || schema[*j].kind != block.kind) {
      throw Error(ErrorKind::SchemaMismatch, "column '" + block.column + "' missing or of a different kind");
    }
    const auto col = static_cast<Eigen::Index>(block.offset);
    if (block.kind == ColumnKind::Numeric) {
      const auto values = table.numeric(*j);
      for (std::size_t r = 0; r < values.size(); ++r) {
        out(static_cast<Eigen::Index>(r), col) = (values[r] - block.mean) * block.scale;
      }
      continue;
    }
    // category code in this table -> one-hot slot, or -1 when unseen in training
    const auto& cats = schema[*j].categories;
    std::vector<Eigen::Index> slot(cats.size(), -1);
    for (std::size_t k = 0; k < cats.size(); ++k) {
      const auto it = std::find(block.labels.begin(), block.labels.end(), cats[k]);
      if (it != block.labels.end()) slot[k] = col + (it - block.labels.begin());
    }
    const auto codes = table.codes(*j);
    for (std::size_t r = 0; r < codes.size(); ++r) {
      const auto s = slot[static_cast<std::size_t>(codes[r])];
      if (s >= 0) out(static_cast<Eigen::Index>(r), s) = 1.0;
    }
  }
  return out;
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) - y z without overflow
double log_loss(double z, double y) { return std::max(z, 0.0) - y * z + std::log1p(std::exp(-std::abs(z))); }

}  // namespace

LogisticObjective logistic_objective(const RowMatrix& x, std::span<const double> y, const Vector& w, double b,
                                     double l2, Exec exec) {
  const std::size_t n = y.size();
  const std::size_t blocks = block_count(n);
  const auto d = x.cols();
  std::vector<Vector> partial_grad(blocks);
  std::vector<double> partial_bias(blocks, 0.0), partial_loss(blocks, 0.0);

  for_each_index(blocks, exec, [&](std::size_t blk) {
    const std::size_t begin = blk * kRowBlock;
    const std::size_t len = std::min(kRowBlock, n - begin);
    const auto rows = x.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(len));
    Vector z = rows * w;
    Vector r(static_cast<Eigen::Index>(len));
    double loss = 0.0, bias = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const double zi = z(static_cast<Eigen::Index>(i)) + b;
      const double yi = y[begin + i];
      loss += log_loss(zi, yi);
      const double ri = sigmoid(zi) - yi;
      r(static_cast<Eigen::Index>(i)) = ri;
      bias += ri;
    }
    partial_grad[blk] = rows.transpose() * r;
    partial_bias[blk] = bias;
    partial_loss[blk] = loss;
  });

  LogisticObjective out;
  out.grad_w = Vector::Zero(d);
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    out.grad_w += partial_grad[blk];
    out.grad_b += partial_bias[blk];
    out.loss += partial_loss[blk];
  }
  out.grad_w += l2 * w;
  out.loss += 0.5 * l2 * w.squaredNorm();
  return out;
}

std::vector<double> LogisticModel::predict_proba(const Table& table) const {
  if (constant) return std::vector<double>(table.rows(), *constant);
  const RowMatrix x = encoder.encode(table);
  const Vector w = Eigen::Map<const Vector>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  const Vector z = x * w;
  std::vector<double> out(table.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigmoid(z(static_cast<Eigen::Index>(i)) + bias);
  return out;
}

std::string resolve_positive_label(const Table& table, const std::string& target,
                                   const std::optional<std::string>& explicit_label) {
  const std::size_t j = table.schema().index_of(target);
  const auto& spec = table.schema()[j];
  if (!spec.is_categorical() || spec.categories.size() > 2) {
    throw Error(ErrorKind::NonBinaryTarget, "target '" + target + "' is not a binary categorical column");
  }
  if (explicit_label) return *explicit_label;
  if (spec.category_index("1")) return "1";
  if (spec.categories.size() == 1) return spec.categories.front();
  std::size_t count0 = 0;
  for (auto c : table.codes(j)) count0 += c == 0 ? 1 : 0;
  const std::size_t count1 = table.rows() - count0;
  return count0 < count1 ? spec.categories[0] : spec.categories[1];
}

LogisticModel fit_logistic(const Table& table, const std::string& target, const LogisticParams& params,
                           const std::optional<std::string>& positive_label, std::span<const std::string> excluded,
                           Exec exec) {
  if (table.rows() == 0) throw Error(ErrorKind::EmptyInput, "logistic regression needs training rows");
  LogisticModel model;
  model.target = target;
  model.positive_label = resolve_positive_label(table, target, positive_label);

  const std::size_t tj = table.schema().index_of(target);
  const auto positive_code = table.schema()[tj].category_index(model.positive_label);
  std::vector<double> y(table.rows(), 0.0);
  double positives = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (positive_code && static_cast<std::size_t>(table.codes(tj)[i]) == *positive_code) {
      y[i] = 1.0;
      positives += 1.0;
    }
  }

  std::vector<std::string> skip(excluded.begin(), excluded.end());
  skip.push_back(target);
  model.encoder = FeatureEncoder::fit(table, skip);
  const double prior = positives / static_cast<double>(y.size());
  if (positives == 0.0 || positives == static_cast<double>(y.size())) {
    model.constant = prior;
    model.weights.assign(model.encoder.dim, 0.0);
    return model;
  }

  const RowMatrix x = model.encoder.encode(table);
  Vector w = Vector::Zero(static_cast<Eigen::Index>(model.encoder.dim));
  double b = std::log(prior / (1.0 - prior));
  double step = params.step;
  auto current = logistic_objective(x, y, w, b, params.l2, exec);
  model.loss_history.reserve(params.iterations + 1);
  model.loss_history.push_back(current.loss);

  for (std::size_t it = 0; it < params.iterations; ++it) {
    for (;;) {
      Vector w_next = w - step * current.grad_w;
      const double b_next = b - step * current.grad_b;
      auto next = logistic_objective(x, y, w_next, b_next, params.l2, exec);
      if (next.loss <= current.loss) {
        w = std::move(w_next);
        b = b_next;
        current = std::move(next);
        break;
      }
      step *= 0.5;
      if (step < 1e-12) break;  // stationary to working precision
    }
    model.loss_history.push_back(current.loss);
  }

  model.weights.assign(w.data(), w.data() + w.size());
  model.bias = b;
  return model;
}

}  // namespace htdbu
