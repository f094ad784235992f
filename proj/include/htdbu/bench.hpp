#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "htdbu/engine.hpp"
#include "htdbu/generators.hpp"
#include "htdbu/metrics.hpp"

namespace htdbu {

struct DatasetConfig {
  std::string name;
  std::string display;  // label used in report tables
  std::filesystem::path data;
  std::optional<std::filesystem::path> corpus;
  std::optional<std::filesystem::path> rule;
  std::string target;
  std::optional<std::string> positive_label;

  bool weak() const { return rule.has_value(); }
};

struct MethodConfig {
  std::string name;
  GeneratorParams params;
};

struct AblationSetting {
  std::string name;
  std::size_t max_train_rows = 8000;
  std::size_t max_conditioning_cols = 12;
};

struct AblationConfig {
  MethodConfig method;
  std::vector<std::string> datasets;
  std::vector<AblationSetting> settings;
};

// The five settings: 1k rows, 3k rows (12 columns each), and 4, 8, 12
// conditioning columns (8,000 rows each).
std::vector<AblationSetting> default_ablation_settings();

struct ExperimentConfig {
  std::vector<DatasetConfig> datasets;
  std::vector<MethodConfig> methods;
  std::vector<std::uint64_t> seeds;
  std::size_t synthetic_rows = 12000;
  double test_fraction = 0.25;
  std::optional<std::filesystem::path> output_dir;
  bool feedback = false;
  std::size_t max_iterations = 3;
  std::optional<AblationConfig> ablation;

  const DatasetConfig& dataset(std::string_view name) const;
};

// Relative paths resolve against `base_dir`. Throws ConfigError.
ExperimentConfig parse_config(std::string_view document, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);
// Method entry: a preset name or {"kind": ..., overrides}. Throws ConfigError.
MethodConfig method_from_name(std::string_view name);

struct TrailSummary {
  std::vector<std::string> signals;  // final signal per iteration
  bool accepted = false;
};

struct RunRecord {
  std::string dataset;
  std::string method;
  std::string setting;  // "default" outside the ablation
  std::uint64_t seed = 0;
  std::optional<EvalReport> report;
  std::size_t synthetic_rows = 0;
  std::optional<TrailSummary> trail;
  std::optional<std::string> error;
};

struct ReportGroup {
  std::string dataset;
  std::string display;
  bool weak = false;
  std::string method;
  std::string setting;
  std::vector<RunRecord> runs;  // in seed order
  std::optional<EvalReport> mean;  // over successful runs
};

struct ReportSet {
  std::vector<std::uint64_t> seeds;
  std::vector<ReportGroup> groups;    // dataset-major, then method
  std::vector<ReportGroup> ablation;  // dataset-major, then setting
  std::size_t failures() const;
};

// Field-wise arithmetic mean; an optional field is kept only when every
// report has it. Throws EmptyInput.
EvalReport mean_report(const std::vector<EvalReport>& reports);

// Every (dataset, method, seed) cell: compose the weak benchmark when a rule
// is configured, stratified split, fit, sample, evaluate. Cells run
// concurrently; results do not depend on the worker count. Config and data
// errors are thrown; per-cell failures are recorded in the run.
ReportSet run_benchmark(const ExperimentConfig& config, Exec exec = Exec::Parallel);
// Only the ablation grid (config.ablation must be set).
ReportSet run_ablation(const ExperimentConfig& config, Exec exec = Exec::Parallel);
// Both grids.
ReportSet run_all(const ExperimentConfig& config, Exec exec = Exec::Parallel);

}  // namespace htdbu
