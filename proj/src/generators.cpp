#include "htdbu/generators.hpp"

#include <algorithm>
#include <numeric>

#include "htdbu/error.hpp"
#include "htdbu/rng.hpp"

namespace htdbu {

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::Independent: return "independent";
    case GeneratorKind::Copula: return "copula";
    case GeneratorKind::SequentialRF: return "seq-rf";
    case GeneratorKind::SequentialGBT: return "seq-gbt";
  }
  return "?";
}

GeneratorKind parse_generator_kind(std::string_view name) {
  for (auto kind : {GeneratorKind::Independent, GeneratorKind::Copula, GeneratorKind::SequentialRF,
                    GeneratorKind::SequentialGBT}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorKind::ConfigError, "unknown method '" + std::string(name) + "'");
}

GeneratorParams GeneratorParams::preset(GeneratorKind kind) {
  GeneratorParams p;
  p.kind = kind;
  switch (kind) {
    case GeneratorKind::Independent:
    case GeneratorKind::Copula:
      break;
    case GeneratorKind::SequentialRF:
      p.max_train_rows = 5000;
      p.max_conditioning_cols = 12;
      p.forest.n_trees = 30;
      break;
    case GeneratorKind::SequentialGBT:
      p.max_train_rows = 8000;
      p.max_conditioning_cols = 12;
      p.gbt.n_rounds = 80;
      p.gbt.max_depth = 6;
      p.gbt.learning_rate = 0.1;
      break;
  }
  return p;
}

std::vector<std::size_t> synthesis_order(const Schema& schema, const SynthesisRoles& roles) {
  std::vector<std::size_t> tail;
  if (roles.target) tail.push_back(schema.index_of(*roles.target));
  if (roles.sentiment) {
    const auto s = schema.index_of(*roles.sentiment);
    if (std::find(tail.begin(), tail.end(), s) == tail.end()) tail.push_back(s);
  }
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (std::find(tail.begin(), tail.end(), j) == tail.end()) order.push_back(j);
  }
  order.insert(order.end(), tail.begin(), tail.end());
  return order;
}

namespace {

Marginal fit_marginal(const Table& table, std::size_t j) {
  Marginal m;
  m.kind = table.schema()[j].kind;
  if (m.kind == ColumnKind::Numeric) {
    const auto v = table.numeric(j);
    m.values.assign(v.begin(), v.end());
    std::sort(m.values.begin(), m.values.end());
  } else {
    m.weights.assign(table.schema()[j].categories.size(), 0.0);
    for (auto c : table.codes(j)) m.weights[static_cast<std::size_t>(c)] += 1.0;
    for (auto& w : m.weights) w /= static_cast<double>(table.rows());
  }
  return m;
}

Table training_subsample(const Table& table, std::size_t max_rows, std::uint64_t seed) {
  const std::size_t n = table.rows();
  if (n <= max_rows) return table;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "subsample"));
  for (std::size_t i = 0; i < max_rows; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
  idx.resize(max_rows);
  std::sort(idx.begin(), idx.end());
  return table.select_rows(idx);
}

FeatureMatrix conditioning_matrix(const Table& table, const std::vector<std::size_t>& cols) {
  FeatureMatrix x(table.rows(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::size_t i = 0; i < table.rows(); ++i) x(i, c) = table.encoded(cols[c], i);
  }
  return x;
}

}  // namespace

GeneratorModel fit_generator(const Table& table, const GeneratorParams& params, std::uint64_t seed,
                             const SynthesisRoles& roles, Exec exec) {
  if (table.rows() == 0 || table.cols() == 0) throw Error(ErrorKind::EmptyInput, "cannot fit a generator on an empty table");
  if (params.max_train_rows == 0) throw Error(ErrorKind::ConfigError, "max_train_rows must be at least 1");

  GeneratorModel model;
  model.schema = table.schema();
  model.params = params;
  model.order = synthesis_order(table.schema(), roles);

  const bool sequential = params.kind == GeneratorKind::SequentialRF || params.kind == GeneratorKind::SequentialGBT;
  const Table train = sequential ? training_subsample(table, params.max_train_rows, seed) : table;
  for (std::size_t j = 0; j < train.cols(); ++j) model.marginals.push_back(fit_marginal(train, j));

  if (params.kind == GeneratorKind::Copula) {
    model.copula = fit_copula(table);
    return model;
  }
  if (!sequential) return model;

  const std::size_t d = model.order.size();
  if (d < 2) return model;
  model.conditionals.resize(d - 1);
  const std::uint64_t base = derive_seed(seed, "conditional");

  for_each_index(d - 1, exec, [&](std::size_t k) {
    const std::size_t pos = k + 1;
    auto& cm = model.conditionals[k];
    cm.column = model.order[pos];
    const std::size_t width = std::min(pos, params.max_conditioning_cols);
    cm.conditioning.assign(model.order.begin() + static_cast<std::ptrdiff_t>(pos - width),
                           model.order.begin() + static_cast<std::ptrdiff_t>(pos));
    const FeatureMatrix x = conditioning_matrix(train, cm.conditioning);
    const std::uint64_t col_seed = derive_seed(base, pos);
    const auto& spec = train.schema()[cm.column];
    if (spec.is_categorical()) {
      const auto y = train.codes(cm.column);
      if (params.kind == GeneratorKind::SequentialRF) {
        cm.forest = fit_forest(x, y, spec.categories.size(), params.forest, col_seed, exec);
      } else {
        cm.gbt = fit_gbt(x, y, spec.categories.size(), params.gbt, col_seed, exec);
      }
    } else {
      const auto y = train.numeric(cm.column);
      const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
      cm.min = *lo;
      cm.max = *hi;
      if (params.kind == GeneratorKind::SequentialRF) {
        cm.forest = fit_forest(x, y, params.forest, col_seed, exec);
      } else {
        cm.gbt = fit_gbt(x, y, params.gbt, col_seed);
      }
    }
  });
  return model;
}

namespace {

double draw_numeric(const Marginal& m, Rng& rng) { return m.values[rng.index(m.values.size())]; }

std::int32_t draw_code(std::span<const double> weights, Rng& rng) {
  return static_cast<std::int32_t>(rng.categorical(weights));
}

double draw_conditional(const ConditionalModel& cm, ColumnKind kind, std::span<const double> x, Rng& rng) {
  if (kind == ColumnKind::Categorical) {
    const auto p = cm.forest ? cm.forest->predict_proba(x) : cm.gbt->predict_proba(x);
    return static_cast<double>(draw_code(p, rng));
  }
  double v;
  if (cm.forest) {
    v = cm.forest->sample_value(x, rng);
  } else {
    v = cm.gbt->predict(x);
    if (!cm.gbt->residuals.empty()) v += cm.gbt->residuals[rng.index(cm.gbt->residuals.size())];
  }
  return std::clamp(v, cm.min, cm.max);
}

}  // namespace

Table sample_rows(const GeneratorModel& model, std::size_t n, std::uint64_t seed, Exec exec) {
  if (n == 0) throw Error(ErrorKind::EmptyInput, "sample size must be at least 1");
  if (model.copula) return sample_copula(*model.copula, n, seed, exec);

  const std::size_t d = model.schema.size();
  std::vector<Column> columns(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (model.schema[j].is_categorical()) {
      columns[j].codes.resize(n);
    } else {
      columns[j].values.resize(n);
    }
  }
  auto store = [&](std::size_t j, std::size_t i, double v) {
    if (model.schema[j].is_categorical()) {
      columns[j].codes[i] = static_cast<std::int32_t>(v);
    } else {
      columns[j].values[i] = v;
    }
  };

  for_each_index(block_count(n), exec, [&](std::size_t blk) {
    Rng rng(derive_seed(seed, blk));
    std::vector<double> row(d, 0.0);
    std::vector<double> features;
    const std::size_t end = std::min(n, (blk + 1) * kRowBlock);
    for (std::size_t i = blk * kRowBlock; i < end; ++i) {
      for (std::size_t pos = 0; pos < model.order.size(); ++pos) {
        const std::size_t j = model.order[pos];
        const auto& m = model.marginals[j];
        double v;
        if (pos == 0 || model.conditionals.empty()) {
          v = m.kind == ColumnKind::Numeric ? draw_numeric(m, rng) : static_cast<double>(draw_code(m.weights, rng));
        } else {
          const auto& cm = model.conditionals[pos - 1];
          features.resize(cm.conditioning.size());
          for (std::size_t c = 0; c < features.size(); ++c) features[c] = row[cm.conditioning[c]];
          v = draw_conditional(cm, m.kind, features, rng);
        }
        row[j] = v;
        store(j, i, v);
      }
    }
  });
  return Table(model.schema, std::move(columns));
}

}  // namespace htdbu
