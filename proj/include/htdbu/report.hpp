#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "htdbu/bench.hpp"

namespace htdbu {

// Metric names used in the CSV exports, in column order.
inline constexpr std::array<std::string_view, 13> kReportMetrics = {
    "trtr_accuracy", "trtr_f1",           "trtr_auroc",       "tstr_accuracy",   "tstr_f1",
    "tstr_auroc",    "gap_accuracy",      "gap_f1",           "gap_auroc",       "numeric_mean_diff",
    "numeric_std_diff", "categorical_tvd", "xmodal"};

std::optional<double> metric_value(const EvalReport& report, std::string_view metric);

// "Independent", "Gaussian copula", "Sequential RF", "Sequential GBT"; other
// names pass through.
std::string method_display(std::string_view method);

// Four decimals, never "-0.0000".
std::string fixed4(double v);

nlohmann::ordered_json to_json(const EvalReport& report);
nlohmann::ordered_json to_json(const ReportSet& set, const std::string& generated_at);

// "| label | acc | f1 | auroc | xmodal |", with "--" for a missing xmodal.
std::string markdown_row(std::string_view label, const EvalReport& report);

// All tables that the set has data for. Best values are bolded per column
// within each dataset block.
void write_markdown(const ReportSet& set, std::ostream& out);
// Header dataset,method,setting,seed,metric,value; one row per group, seed
// (plus "mean") and metric. Missing values are left empty.
void write_csv(const std::vector<ReportGroup>& groups, const std::vector<std::uint64_t>& seeds, std::ostream& out);

enum class ReportFormat { Json, Markdown, Csv };
// Throws ConfigError.
ReportFormat parse_report_format(std::string_view name);

// Writes report.md, report.csv, ablation.csv and report.json (each only when
// it has content and matches `only`). Returns the paths written. Throws
// IOError.
std::vector<std::filesystem::path> emit_report(const ReportSet& set, const std::filesystem::path& dir,
                                               std::optional<ReportFormat> only = std::nullopt);

// UTC, ISO 8601.
std::string utc_timestamp();

}  // namespace htdbu
