#pragma once

#include <cstdint>
#include <vector>

#include "htdbu/linalg.hpp"
#include "htdbu/parallel.hpp"
#include "htdbu/table.hpp"

namespace htdbu {

struct CopulaMarginal {
  ColumnKind kind = ColumnKind::Numeric;
  std::vector<double> sorted;  // numeric: training values, ascending
  std::vector<double> cuts;    // categorical: K+1 cumulative boundaries, 0 .. 1
  bool constant = false;
  bool operator==(const CopulaMarginal&) const = default;
};

struct CopulaModel {
  Schema schema;
  std::vector<CopulaMarginal> marginals;
  Matrix correlation;
  Matrix factor;  // lower Cholesky factor of `correlation`

  bool operator==(const CopulaModel& o) const {
    return schema == o.schema && marginals == o.marginals && correlation == o.correlation && factor == o.factor;
  }
};

// Normal scores: numeric columns use average ranks, Phi^-1((rank - 0.5) / n);
// categorical columns use the midpoint of the category's cumulative-frequency
// interval. Constant columns get a zero correlation row. Throws EmptyInput
// for fewer than two rows or no columns.
CopulaModel fit_copula(const Table& table);

// z = L eps per row, mapped back through each marginal. Rows are drawn in
// kRowBlock blocks with per-block RNG streams.
Table sample_copula(const CopulaModel& model, std::size_t n, std::uint64_t seed, Exec exec = Exec::Parallel);

}  // namespace htdbu
