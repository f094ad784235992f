#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "htdbu/copula.hpp"
#include "htdbu/forest.hpp"
#include "htdbu/gbt.hpp"
#include "htdbu/parallel.hpp"
#include "htdbu/table.hpp"

namespace htdbu {

enum class GeneratorKind { Independent, Copula, SequentialRF, SequentialGBT };

// CLI names: independent, copula, seq-rf, seq-gbt.
std::string_view to_string(GeneratorKind kind);
// Throws ConfigError.
GeneratorKind parse_generator_kind(std::string_view name);

struct GeneratorParams {
  GeneratorKind kind = GeneratorKind::Independent;
  std::size_t max_train_rows = 5000;
  std::size_t max_conditioning_cols = 12;
  ForestParams forest;
  GbtParams gbt;

  // seq-rf: 5000 rows, 12 conditioning columns, 30 trees.
  // seq-gbt: 8000 rows, 12 conditioning columns, 80 rounds of depth 6.
  static GeneratorParams preset(GeneratorKind kind);
  bool operator==(const GeneratorParams&) const = default;
};

// Columns that the sequential generators place last, in this order.
struct SynthesisRoles {
  std::optional<std::string> target;
  std::optional<std::string> sentiment;
};

// Schema order with the target and then the sentiment column moved to the
// end. Throws UnknownColumn.
std::vector<std::size_t> synthesis_order(const Schema& schema, const SynthesisRoles& roles = {});

struct Marginal {
  ColumnKind kind = ColumnKind::Numeric;
  std::vector<double> values;   // numeric: training values, ascending
  std::vector<double> weights;  // categorical: relative frequency per code
  bool operator==(const Marginal&) const = default;
};

struct ConditionalModel {
  std::size_t column = 0;
  std::vector<std::size_t> conditioning;  // earlier columns, in synthesis order
  std::optional<ForestModel> forest;
  std::optional<GbtModel> gbt;
  double min = 0.0;  // numeric clipping range from training data
  double max = 0.0;
  bool operator==(const ConditionalModel&) const = default;
};

struct GeneratorModel {
  Schema schema;
  GeneratorParams params;
  std::vector<std::size_t> order;
  std::vector<Marginal> marginals;  // per schema column
  std::optional<CopulaModel> copula;
  std::vector<ConditionalModel> conditionals;  // order[1..], sequential kinds only

  bool operator==(const GeneratorModel&) const = default;
};

// Independent keeps marginals only; Copula fits on every row; the sequential
// kinds subsample to max_train_rows and fit one conditional model per column
// after the first, reading at most max_conditioning_cols preceding columns.
// Throws EmptyInput.
GeneratorModel fit_generator(const Table& table, const GeneratorParams& params, std::uint64_t seed,
                             const SynthesisRoles& roles = {}, Exec exec = Exec::Parallel);

// Throws EmptyInput for n == 0.
Table sample_rows(const GeneratorModel& model, std::size_t n, std::uint64_t seed, Exec exec = Exec::Parallel);

}  // namespace htdbu
