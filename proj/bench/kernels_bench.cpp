// Serial reference vs OpenMP kernels. Run with HTDBU_WORKERS=<n> to pin the
// worker count; both variants produce identical results, only timing differs.

#include <benchmark/benchmark.h>

#include "htdbu/forest.hpp"
#include "htdbu/generators.hpp"
#include "htdbu/logistic.hpp"
#include "htdbu/parallel.hpp"
#include "htdbu/rng.hpp"

namespace {

using htdbu::Exec;

htdbu::Table synthetic_table(std::size_t n) {
  htdbu::Rng rng(1);
  std::vector<double> a(n), b(n);
  std::vector<std::int32_t> c(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.normal();
    b[i] = 0.6 * a[i] + 0.8 * rng.normal();
    c[i] = static_cast<std::int32_t>(rng.index(4));
    y[i] = a[i] + 0.3 * c[i] + 0.5 * rng.normal() > 0.5 ? 1 : 0;
  }
  using htdbu::ColumnKind;
  return htdbu::Table(htdbu::Schema({{"a", ColumnKind::Numeric, {}},
                                     {"b", ColumnKind::Numeric, {}},
                                     {"c", ColumnKind::Categorical, {"w", "x", "y", "z"}},
                                     {"y", ColumnKind::Categorical, {"0", "1"}}}),
                      {htdbu::Column::numeric(a), htdbu::Column::numeric(b), htdbu::Column::categorical(c),
                       htdbu::Column::categorical(y)});
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_ForestFit(benchmark::State& state) {
  const std::size_t n = 4000;
  htdbu::Rng rng(2);
  htdbu::FeatureMatrix x(n, 8);
  std::vector<std::int32_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    for (std::size_t c = 0; c < 8; ++c) s += (x(i, c) = rng.normal());
    y[i] = s > 0 ? 1 : 0;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(htdbu::fit_forest(x, y, 2, htdbu::ForestParams{}, 3, exec_of(state)));
  }
}
BENCHMARK(BM_ForestFit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SampleRows(benchmark::State& state) {
  const auto table = synthetic_table(3000);
  auto params = htdbu::GeneratorParams::preset(htdbu::GeneratorKind::SequentialRF);
  const auto model = htdbu::fit_generator(table, params, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(htdbu::sample_rows(model, 12000, 5, exec_of(state)));
  }
}
BENCHMARK(BM_SampleRows)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LogisticObjective(benchmark::State& state) {
  const auto table = synthetic_table(50000);
  const std::vector<std::string> excluded{"y"};
  const auto x = htdbu::FeatureEncoder::fit(table, excluded).encode(table);
  std::vector<double> y(table.rows());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = table.codes(3)[i];
  const htdbu::Vector w = htdbu::Vector::Constant(x.cols(), 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(htdbu::logistic_objective(x, y, w, 0.0, 1e-4, exec_of(state)));
  }
}
BENCHMARK(BM_LogisticObjective)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

int main(int argc, char** argv) {
  htdbu::configure_workers();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
