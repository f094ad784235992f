#include "htdbu/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "htdbu/csv.hpp"
#include "htdbu/error.hpp"

namespace htdbu {

using Json = nlohmann::ordered_json;

std::optional<double> metric_value(const EvalReport& r, std::string_view metric) {
  static const std::map<std::string_view, std::function<std::optional<double>(const EvalReport&)>> table = {
      {"trtr_accuracy", [](const EvalReport& e) { return std::optional(e.trtr.accuracy); }},
      {"trtr_f1", [](const EvalReport& e) { return std::optional(e.trtr.f1); }},
      {"trtr_auroc", [](const EvalReport& e) { return std::optional(e.trtr.auroc); }},
      {"tstr_accuracy", [](const EvalReport& e) { return std::optional(e.tstr.accuracy); }},
      {"tstr_f1", [](const EvalReport& e) { return std::optional(e.tstr.f1); }},
      {"tstr_auroc", [](const EvalReport& e) { return std::optional(e.tstr.auroc); }},
      {"gap_accuracy", [](const EvalReport& e) { return std::optional(e.gap.accuracy); }},
      {"gap_f1", [](const EvalReport& e) { return std::optional(e.gap.f1); }},
      {"gap_auroc", [](const EvalReport& e) { return std::optional(e.gap.auroc); }},
      {"numeric_mean_diff", [](const EvalReport& e) { return e.numeric_mean_diff; }},
      {"numeric_std_diff", [](const EvalReport& e) { return e.numeric_std_diff; }},
      {"categorical_tvd", [](const EvalReport& e) { return e.categorical_tvd; }},
      {"xmodal", [](const EvalReport& e) { return e.xmodal; }},
  };
  const auto it = table.find(metric);
  if (it == table.end()) throw Error(ErrorKind::ConfigError, "unknown metric '" + std::string(metric) + "'");
  return it->second(r);
}

std::string method_display(std::string_view method) {
  if (method == "independent") return "Independent";
  if (method == "copula") return "Gaussian copula";
  if (method == "seq-rf") return "Sequential RF";
  if (method == "seq-gbt") return "Sequential GBT";
  return std::string(method);
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s(buf);
  if (s == "-0.0000") s = "0.0000";
  return s;
}

namespace {

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json utility_json(const UtilityScores& u) {
  return Json{{"accuracy", u.accuracy}, {"f1", u.f1}, {"auroc", u.auroc}, {"single_class", u.single_class}};
}

}  // namespace

Json to_json(const EvalReport& r) {
  return Json{{"trtr", utility_json(r.trtr)},
              {"tstr", utility_json(r.tstr)},
              {"gap", Json{{"accuracy", r.gap.accuracy}, {"f1", r.gap.f1}, {"auroc", r.gap.auroc}}},
              {"numeric_mean_diff", opt_json(r.numeric_mean_diff)},
              {"numeric_std_diff", opt_json(r.numeric_std_diff)},
              {"categorical_tvd", opt_json(r.categorical_tvd)},
              {"xmodal", opt_json(r.xmodal)}};
}

namespace {

Json groups_json(const std::vector<ReportGroup>& groups) {
  Json out = Json::array();
  for (const auto& g : groups) {
    Json runs = Json::array();
    for (const auto& r : g.runs) {
      Json run{{"seed", r.seed}, {"synthetic_rows", r.synthetic_rows}};
      run["report"] = r.report ? to_json(*r.report) : Json(nullptr);
      if (r.trail) run["trail"] = Json{{"signals", r.trail->signals}, {"accepted", r.trail->accepted}};
      run["error"] = r.error ? Json(*r.error) : Json(nullptr);
      runs.push_back(std::move(run));
    }
    Json j{{"dataset", g.dataset}, {"method", g.method}, {"setting", g.setting}, {"weak", g.weak}};
    j["mean"] = g.mean ? to_json(*g.mean) : Json(nullptr);
    j["runs"] = std::move(runs);
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace

Json to_json(const ReportSet& set, const std::string& generated_at) {
  return Json{{"format", "htdbu.report/1"},
              {"generated_at", generated_at},
              {"seeds", set.seeds},
              {"benchmark", groups_json(set.groups)},
              {"ablation", groups_json(set.ablation)}};
}

std::string markdown_row(std::string_view label, const EvalReport& r) {
  return "| " + std::string(label) + " | " + fixed4(r.tstr.accuracy) + " | " + fixed4(r.tstr.f1) + " | " +
         fixed4(r.tstr.auroc) + " | " + (r.xmodal ? fixed4(*r.xmodal) : std::string("--")) + " |";
}

namespace {

enum class Better { Higher, Lower, None };

struct ColumnDef {
  std::string header;
  Better better;
  std::function<std::optional<double>(const EvalReport&)> value;
};

ColumnDef metric_column(std::string header, Better better, std::string_view metric) {
  return {std::move(header), better, [m = std::string(metric)](const EvalReport& r) { return metric_value(r, m); }};
}

std::string arrow(Better b) {
  switch (b) {
    case Better::Higher: return " ↑";
    case Better::Lower: return " ↓";
    case Better::None: return "";
  }
  return "";
}

// One table. Rows are (leading label cells, report); blocks delimit the row
// ranges inside which best values are bolded.
struct TableRow {
  std::vector<std::string> labels;
  const EvalReport* report = nullptr;
  std::size_t block = 0;
};

void write_table(std::ostream& out, const std::vector<std::string>& label_headers, const std::vector<ColumnDef>& cols,
                 const std::vector<TableRow>& rows) {
  out << "|";
  for (const auto& h : label_headers) out << " " << h << " |";
  for (const auto& c : cols) out << " " << c.header << arrow(c.better) << " |";
  out << "\n|";
  for (std::size_t i = 0; i < label_headers.size(); ++i) out << " --- |";
  for (std::size_t i = 0; i < cols.size(); ++i) out << " ---: |";
  out << "\n";

  // best rounded value per (block, column)
  std::map<std::pair<std::size_t, std::size_t>, double> best;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (cols[c].better == Better::None) continue;
      const auto v = cols[c].value(*row.report);
      if (!v) continue;
      const double rounded = std::stod(fixed4(*v));
      const auto key = std::make_pair(row.block, c);
      const auto it = best.find(key);
      if (it == best.end() || (cols[c].better == Better::Higher ? rounded > it->second : rounded < it->second)) {
        best[key] = rounded;
      }
    }
  }
  for (const auto& row : rows) {
    out << "|";
    for (const auto& l : row.labels) out << " " << l << " |";
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto v = cols[c].value(*row.report);
      if (!v) {
        out << " -- |";
        continue;
      }
      const std::string text = fixed4(*v);
      const auto it = best.find({row.block, c});
      const bool bold = it != best.end() && std::stod(text) == it->second;
      out << " " << (bold ? "**" + text + "**" : text) << " |";
    }
    out << "\n";
  }
  out << "\n";
}

std::vector<const ReportGroup*> with_mean(const std::vector<ReportGroup>& groups, bool weak_only, bool tabular_only) {
  std::vector<const ReportGroup*> out;
  for (const auto& g : groups) {
    if (!g.mean) continue;
    if (weak_only && !g.weak) continue;
    if (tabular_only && g.weak) continue;
    out.push_back(&g);
  }
  return out;
}

std::vector<TableRow> block_rows(const std::vector<const ReportGroup*>& groups, bool setting_label) {
  std::vector<TableRow> rows;
  std::vector<std::string> seen;
  for (const auto* g : groups) {
    auto it = std::find(seen.begin(), seen.end(), g->dataset);
    if (it == seen.end()) {
      seen.push_back(g->dataset);
      it = seen.end() - 1;
    }
    const std::string second = setting_label ? g->setting : method_display(g->method);
    rows.push_back({{g->display, second}, &*g->mean, static_cast<std::size_t>(it - seen.begin())});
  }
  return rows;
}

}  // namespace

void write_markdown(const ReportSet& set, std::ostream& out) {
  std::string seeds;
  for (std::size_t i = 0; i < set.seeds.size(); ++i) seeds += (i ? ", " : "") + std::to_string(set.seeds[i]);
  out << "# H-TDBU benchmark report\n\n";
  out << "Values are means over seeds " << seeds
      << ". Arrows indicate metric direction; bold marks the best value in each column within a dataset.\n\n";

  const std::vector<ColumnDef> main_cols = {
      metric_column("Acc.", Better::Higher, "tstr_accuracy"), metric_column("F1", Better::Higher, "tstr_f1"),
      metric_column("AUROC", Better::Higher, "tstr_auroc"), metric_column("XModal", Better::Lower, "xmodal")};

  std::vector<std::string> weak_datasets;
  for (const auto* g : with_mean(set.groups, true, false)) {
    if (std::find(weak_datasets.begin(), weak_datasets.end(), g->dataset) == weak_datasets.end()) {
      weak_datasets.push_back(g->dataset);
    }
  }
  for (const auto& name : weak_datasets) {
    std::vector<TableRow> rows;
    std::string display;
    for (const auto* g : with_mean(set.groups, true, false)) {
      if (g->dataset != name) continue;
      display = g->display;
      rows.push_back({{method_display(g->method)}, &*g->mean, 0});
    }
    out << "## " << display << " weak multimodal benchmark (TSTR)\n\n";
    write_table(out, {"Method"}, main_cols, rows);
  }

  if (const auto weak = with_mean(set.groups, true, false); !weak.empty()) {
    out << "## Utility diagnostics (gap = TSTR - TRTR)\n\n";
    const std::vector<ColumnDef> cols = {
        metric_column("TRTR Acc.", Better::Higher, "trtr_accuracy"),
        metric_column("TSTR Acc.", Better::Higher, "tstr_accuracy"),
        metric_column("Gap Acc.", Better::Higher, "gap_accuracy"),
        metric_column("TRTR F1", Better::Higher, "trtr_f1"),
        metric_column("TSTR F1", Better::Higher, "tstr_f1"),
        metric_column("Gap F1", Better::Higher, "gap_f1"),
        metric_column("TRTR AUROC", Better::Higher, "trtr_auroc"),
        metric_column("TSTR AUROC", Better::Higher, "tstr_auroc"),
        metric_column("Gap AUROC", Better::Higher, "gap_auroc")};
    write_table(out, {"Benchmark", "Method"}, cols, block_rows(weak, false));
  }

  const std::vector<ColumnDef> auroc_cols = {
      metric_column("TRTR AUROC", Better::Higher, "trtr_auroc"),
      metric_column("TSTR AUROC", Better::Higher, "tstr_auroc"),
      metric_column("Gap AUROC", Better::Higher, "gap_auroc"),
      metric_column("TSTR Acc.", Better::Higher, "tstr_accuracy"),
      metric_column("TSTR F1", Better::Higher, "tstr_f1")};

  if (const auto tab = with_mean(set.groups, false, true); !tab.empty()) {
    out << "## Tabular-only benchmarks\n\n";
    write_table(out, {"Dataset", "Method"}, auroc_cols, block_rows(tab, false));
  }

  if (const auto all = with_mean(set.groups, false, false); !all.empty()) {
    out << "## Fidelity diagnostics\n\n";
    const std::vector<ColumnDef> cols = {
        metric_column("Num. mean diff", Better::Lower, "numeric_mean_diff"),
        metric_column("Num. std diff", Better::Lower, "numeric_std_diff"),
        metric_column("Cat. TVD", Better::Lower, "categorical_tvd"),
        metric_column("XModal", Better::Lower, "xmodal")};
    write_table(out, {"Dataset", "Method"}, cols, block_rows(all, false));
  }

  if (const auto abl = with_mean(set.ablation, false, false); !abl.empty()) {
    out << "## Ablation (" << method_display(abl.front()->method) << ")\n\n";
    write_table(out, {"Benchmark", "Setting"}, auroc_cols, block_rows(abl, true));

    out << "## Best ablation setting by AUROC\n\n";
    std::vector<const ReportGroup*> best;
    for (const auto* g : abl) {
      auto it = std::find_if(best.begin(), best.end(), [&](const ReportGroup* b) { return b->dataset == g->dataset; });
      if (it == best.end()) {
        best.push_back(g);
      } else if (g->mean->tstr.auroc > (*it)->mean->tstr.auroc) {
        *it = g;
      }
    }
    std::vector<TableRow> rows;
    for (const auto* g : best) rows.push_back({{g->display, g->setting}, &*g->mean, 0});
    const std::vector<ColumnDef> cols = {
        metric_column("Acc.", Better::Higher, "tstr_accuracy"), metric_column("F1", Better::Higher, "tstr_f1"),
        metric_column("AUROC", Better::Higher, "tstr_auroc")};
    write_table(out, {"Benchmark", "Best setting"}, cols, rows);
  }

  if (const std::size_t failed = set.failures(); failed > 0) {
    out << "## Failed runs\n\n";
    for (const auto* list : {&set.groups, &set.ablation}) {
      for (const auto& g : *list) {
        for (const auto& r : g.runs) {
          if (r.error) out << "- " << g.dataset << " / " << g.method << " / " << g.setting << " / seed " << r.seed << ": " << *r.error << "\n";
        }
      }
    }
    out << "\n";
  }
}

void write_csv(const std::vector<ReportGroup>& groups, const std::vector<std::uint64_t>& seeds, std::ostream& out) {
  write_csv_record(out, std::vector<std::string>{"dataset", "method", "setting", "seed", "metric", "value"});
  for (const auto& g : groups) {
    auto emit = [&](const std::string& seed, const EvalReport* report) {
      for (const auto metric : kReportMetrics) {
        std::string value;
        if (report) {
          if (const auto v = metric_value(*report, metric)) value = format_number(*v);
        }
        write_csv_record(out, std::vector<std::string>{g.dataset, g.method, g.setting, seed, std::string(metric), value});
      }
    };
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const RunRecord* run = s < g.runs.size() ? &g.runs[s] : nullptr;
      emit(std::to_string(seeds[s]), run && run->report ? &*run->report : nullptr);
    }
    emit("mean", g.mean ? &*g.mean : nullptr);
  }
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  if (name == "csv") return ReportFormat::Csv;
  throw Error(ErrorKind::ConfigError, "unknown format '" + std::string(name) + "'");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::filesystem::path> emit_report(const ReportSet& set, const std::filesystem::path& dir,
                                               std::optional<ReportFormat> only) {
  if (set.groups.empty() && set.ablation.empty()) throw Error(ErrorKind::EmptyInput, "report set is empty");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IOError, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto write_file = [&](const std::string& name, const std::function<void(std::ostream&)>& body) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IOError, "cannot write " + path.string());
    body(out);
    if (!out) throw Error(ErrorKind::IOError, "failed writing " + path.string());
    written.push_back(path);
  };
  auto wanted = [&](ReportFormat f) { return !only || *only == f; };

  if (wanted(ReportFormat::Markdown)) write_file("report.md", [&](std::ostream& o) { write_markdown(set, o); });
  if (wanted(ReportFormat::Csv)) {
    if (!set.groups.empty()) write_file("report.csv", [&](std::ostream& o) { write_csv(set.groups, set.seeds, o); });
    if (!set.ablation.empty()) {
      write_file("ablation.csv", [&](std::ostream& o) { write_csv(set.ablation, set.seeds, o); });
    }
  }
  if (wanted(ReportFormat::Json)) {
    write_file("report.json", [&](std::ostream& o) { o << to_json(set, utc_timestamp()).dump(2) << "\n"; });
  }
  return written;
}

}  // namespace htdbu
