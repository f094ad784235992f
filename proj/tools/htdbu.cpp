// htdbu command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data or configuration error,
// 3 reconciliation exhausted without an Accept.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "htdbu/bench.hpp"
#include "htdbu/engine.hpp"
#include "htdbu/error.hpp"
#include "htdbu/model_io.hpp"
#include "htdbu/parallel.hpp"
#include "htdbu/report.hpp"
#include "htdbu/rng.hpp"
#include "htdbu/summary.hpp"

namespace fs = std::filesystem;
using namespace htdbu;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitExhausted = 3;

struct Options {
  std::string config;
  std::string data;
  std::string corpus;
  std::string rule;
  std::string method = "seq-rf";
  std::size_t rows = 12000;
  std::uint64_t seed = 42;
  std::vector<std::uint64_t> seeds;
  std::string target;
  std::string out;
  std::string format;
  bool feedback = false;
  std::size_t max_iters = 3;
  std::string synthetic;
  std::string positive;
  std::string save_model;
  std::string load_model;
  double test_fraction = 0.25;
  std::string rule_path;  // validate-rule positional
};

std::optional<std::string> opt(const std::string& s) {
  return s.empty() ? std::nullopt : std::optional<std::string>(s);
}

// Real data as the generators see it: the tabular file, with the rule's
// sentiment column composed in when a rule is given. The text column is not
// kept.
struct RealData {
  Table table;
  std::optional<RuleSpec> rule;
  std::optional<TextCorpus> corpus;
  std::string target;
};

RealData load_real(const Options& o, bool need_target) {
  RealData d;
  d.table = load_table(o.data);
  if (!o.rule.empty()) {
    if (o.corpus.empty()) throw Error(ErrorKind::ConfigError, "--rule needs --corpus");
    d.rule = load_rule(o.rule);
    d.corpus = load_corpus(o.corpus);
    d.table = compose_weak_benchmark(d.table, *d.corpus, *d.rule, o.seed);
    if (d.rule->text_column) d.table = d.table.drop_column(*d.rule->text_column);
  }
  d.target = !o.target.empty() ? o.target : (d.rule ? d.rule->target_column : std::string());
  if (need_target && d.target.empty()) throw Error(ErrorKind::ConfigError, "--target is required without --rule");
  return d;
}

SynthesisRoles roles_of(const RealData& d) {
  SynthesisRoles roles;
  if (!d.target.empty()) roles.target = d.target;
  if (d.rule) roles.sentiment = d.rule->sentiment_column;
  return roles;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IOError, "cannot write " + path);
  out << text;
}

int cmd_synth(const Options& o) {
  RealData d = load_real(o, false);
  GeneratorModel model;
  if (!o.load_model.empty()) {
    model = load_model(o.load_model);
  } else {
    model = fit_generator(d.table, GeneratorParams::preset(parse_generator_kind(o.method)), o.seed, roles_of(d));
  }
  if (!o.save_model.empty()) save_model(model, o.save_model);
  Table syn = sample_rows(model, o.rows, derive_seed(o.seed, "sample"));
  if (d.rule && d.corpus) syn = attach_text(syn, *d.corpus, *d.rule, derive_seed(o.seed, "text"));
  if (o.out.empty() || o.out == "-") {
    write_table(syn, std::cout);
  } else {
    write_table(syn, fs::path(o.out));
  }
  return kExitOk;
}

int cmd_eval(const Options& o) {
  RealData d = load_real(o, true);
  auto parts = split(d.table, o.test_fraction, o.seed, d.target);
  const Table syn = load_table(o.synthetic, d.table.schema());
  ReportOptions ro;
  ro.utility.positive_label = resolve_positive_label(parts.test, d.target, opt(o.positive));
  const auto report = build_report(parts.train, parts.test, syn, d.target, d.rule ? &*d.rule : nullptr, ro);
  const auto format = o.format.empty() ? ReportFormat::Json : parse_report_format(o.format);
  std::string text;
  if (format == ReportFormat::Markdown) {
    text = "| Method | Acc. ↑ | F1 ↑ | AUROC ↑ | XModal ↓ |\n| --- | ---: | ---: | ---: | ---: |\n" +
           markdown_row(fs::path(o.synthetic).stem().string(), report) + "\n";
  } else if (format == ReportFormat::Json) {
    text = to_json(report).dump(2) + "\n";
  } else {
    std::ostringstream csv;
    write_csv_record(csv, std::vector<std::string>{"metric", "value"});
    for (const auto metric : kReportMetrics) {
      const auto v = metric_value(report, metric);
      write_csv_record(csv, std::vector<std::string>{std::string(metric), v ? format_number(*v) : std::string()});
    }
    text = csv.str();
  }
  write_text(o.out, text);
  return kExitOk;
}

ExperimentConfig bench_config(const Options& o) {
  ExperimentConfig cfg = load_config(o.config);
  if (!o.seeds.empty()) cfg.seeds = o.seeds;
  if (o.feedback) cfg.feedback = true;
  cfg.max_iterations = o.max_iters;
  if (!o.out.empty()) cfg.output_dir = fs::path(o.out);
  if (!cfg.output_dir) cfg.output_dir = fs::path("htdbu-report");
  return cfg;
}

int emit(const ReportSet& set, const ExperimentConfig& cfg, const Options& o) {
  const auto only = o.format.empty() ? std::nullopt : std::optional(parse_report_format(o.format));
  for (const auto& p : emit_report(set, *cfg.output_dir, only)) std::cerr << "wrote " << p.string() << "\n";
  if (const auto failed = set.failures(); failed > 0) {
    std::cerr << failed << " run(s) failed; see the report for details\n";
    return kExitData;
  }
  return kExitOk;
}

int cmd_bench(const Options& o) {
  const auto cfg = bench_config(o);
  return emit(run_all(cfg), cfg, o);
}

int cmd_ablate(const Options& o) {
  const auto cfg = bench_config(o);
  return emit(run_ablation(cfg), cfg, o);
}

Json signal_json(const Signal& s) {
  Json j{{"kind", to_string(s.kind)}};
  if (s.cause) {
    j["cause"] = Json{{"metric", s.cause->metric}, {"observed", s.cause->observed}, {"threshold", s.cause->threshold}};
  }
  return j;
}

int cmd_reconcile(const Options& o) {
  if (o.rule.empty()) throw Error(ErrorKind::ConfigError, "reconcile needs --rule and --corpus");
  RealData d = load_real(o, true);
  auto parts = split(d.table, o.test_fraction, o.seed, d.target);
  ReconcileOptions ro;
  ro.max_iterations = o.max_iters;
  ro.rows = o.rows;
  ro.report.utility.positive_label = resolve_positive_label(parts.test, d.target, opt(o.positive));
  ro.label_frequencies = d.corpus->label_frequencies();
  ro.corpus = &*d.corpus;
  const auto result = reconcile(parts.train, parts.test, *d.rule, GeneratorParams::preset(parse_generator_kind(o.method)),
                                ro, o.seed);

  Json trail = Json::array();
  for (const auto& e : result.trail.entries) {
    Json signals = Json::array();
    for (const auto& s : e.signals) signals.push_back(signal_json(s));
    Json actions = Json::array();
    for (const auto a : e.actions) actions.push_back(to_string(a));
    trail.push_back(Json{{"iteration", e.iteration},
                         {"seed", e.seed},
                         {"signal", signal_json(e.signal)},
                         {"signals", signals},
                         {"actions", actions},
                         {"violation_rate", e.constraints.violation_rate},
                         {"report", to_json(e.report)}});
  }
  Json doc{{"format", "htdbu.trail/1"},
           {"method", o.method},
           {"seed", o.seed},
           {"accepted", result.trail.accepted()},
           {"iterations", trail},
           {"final", to_json(result.report)}};

  const fs::path dir = o.out.empty() ? fs::path("htdbu-reconcile") : fs::path(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IOError, "cannot create " + dir.string());
  write_table(result.table, dir / "synthetic.csv");
  write_text((dir / "trail.json").string(), doc.dump(2) + "\n");
  std::cerr << (result.trail.accepted() ? "accepted" : "exhausted") << " after " << result.trail.entries.size()
            << " iteration(s)\n";
  return result.trail.accepted() ? kExitOk : kExitExhausted;
}

int cmd_summarize(const Options& o) {
  const Table table = load_table(o.data);
  std::optional<TextCorpus> corpus;
  if (!o.corpus.empty()) corpus = load_corpus(o.corpus);
  const auto summary = summarize(table, corpus ? &*corpus : nullptr, opt(o.target));
  write_text(o.out, to_json(summary).dump(2) + "\n");
  return kExitOk;
}

int cmd_validate_rule(const Options& o) {
  const RuleSpec rule = load_rule(o.rule_path);
  if (o.data.empty()) {
    std::cout << "ok: " << rule.name << " parses\n";
    return kExitOk;
  }
  const Table table = load_table(o.data);
  const auto findings = validate_rule(rule, table.schema());
  if (findings.empty()) {
    std::cout << "ok: " << rule.name << " binds to " << o.data << "\n";
    return kExitOk;
  }
  for (const auto& f : findings) std::cout << to_string(f.kind) << ": " << f.detail << "\n";
  return kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  configure_workers();
  CLI::App app{"H-TDBU synthetic tabular data toolkit"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--data", o.data, "real tabular CSV");
    sub->add_option("--corpus", o.corpus, "sentiment-labelled text CSV");
    sub->add_option("--rule", o.rule, "rule JSON");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--target", o.target, "target column");
    sub->add_option("--out", o.out, "output path");
    sub->add_option("--positive", o.positive, "positive target label");
    sub->add_option("--test-fraction", o.test_fraction, "held-out share of real rows")->check(CLI::Range(0.0, 1.0));
  };
  const auto methods = CLI::IsMember({"independent", "copula", "seq-rf", "seq-gbt"});
  const auto formats = CLI::IsMember({"json", "markdown", "md", "csv"});

  auto* synth = app.add_subcommand("synth", "fit one generator and write a synthetic CSV");
  add_common(synth);
  synth->get_option("--data")->required();
  synth->add_option("--method", o.method, "generator")->check(methods);
  synth->add_option("--rows", o.rows, "rows to sample")->check(CLI::PositiveNumber);
  synth->add_option("--save-model", o.save_model, "write the fitted model as JSON");
  synth->add_option("--load-model", o.load_model, "sample from a saved model instead of fitting");

  auto* eval = app.add_subcommand("eval", "score a synthetic CSV against the real data");
  add_common(eval);
  eval->get_option("--data")->required();
  eval->add_option("--synthetic", o.synthetic, "synthetic CSV")->required();
  eval->add_option("--format", o.format, "json, markdown or csv")->check(formats);

  auto* bench = app.add_subcommand("bench", "run the full benchmark grid");
  auto* ablate = app.add_subcommand("ablate", "run the ablation grid");
  for (auto* sub : {bench, ablate}) {
    sub->add_option("--config", o.config, "experiment config JSON")->required();
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--format", o.format, "json, markdown or csv (default: all)")->check(formats);
    sub->add_option("--seeds", o.seeds, "comma-separated seeds")->delimiter(',');
    sub->add_flag("--feedback", o.feedback, "run the reconciliation loop per cell");
    sub->add_option("--max-iters", o.max_iters, "reconciliation iterations")->check(CLI::PositiveNumber);
  }

  auto* rec = app.add_subcommand("reconcile", "generate, evaluate and act on feedback signals");
  add_common(rec);
  rec->get_option("--data")->required();
  rec->get_option("--rule")->required();
  rec->get_option("--corpus")->required();
  rec->add_option("--method", o.method, "generator")->check(methods);
  rec->add_option("--rows", o.rows, "rows to sample")->check(CLI::PositiveNumber);
  rec->add_option("--max-iters", o.max_iters, "iteration budget")->check(CLI::PositiveNumber);

  auto* summ = app.add_subcommand("summarize", "dataset summary for rule authoring");
  summ->add_option("--data", o.data, "tabular CSV")->required();
  summ->add_option("--corpus", o.corpus, "sentiment-labelled text CSV");
  summ->add_option("--target", o.target, "target column");
  summ->add_option("--out", o.out, "output file (default stdout)");

  auto* vr = app.add_subcommand("validate-rule", "check a rule file, optionally against a dataset");
  vr->add_option("rule", o.rule_path, "rule JSON")->required();
  vr->add_option("--data", o.data, "tabular CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*synth) return cmd_synth(o);
    if (*eval) return cmd_eval(o);
    if (*bench) return cmd_bench(o);
    if (*ablate) return cmd_ablate(o);
    if (*rec) return cmd_reconcile(o);
    if (*summ) return cmd_summarize(o);
    if (*vr) return cmd_validate_rule(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 1;
}
