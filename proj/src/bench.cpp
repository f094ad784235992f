#include "htdbu/bench.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "htdbu/error.hpp"
#include "htdbu/rng.hpp"

namespace htdbu {

using Json = nlohmann::ordered_json;

std::vector<AblationSetting> default_ablation_settings() {
  return {{"1k rows", 1000, 12}, {"3k rows", 3000, 12}, {"4 cols", 8000, 4}, {"8 cols", 8000, 8}, {"12 cols", 8000, 12}};
}

const DatasetConfig& ExperimentConfig::dataset(std::string_view name) const {
  for (const auto& d : datasets) {
    if (d.name == name) return d;
  }
  throw Error(ErrorKind::ConfigError, "no dataset named '" + std::string(name) + "'");
}

std::size_t ReportSet::failures() const {
  std::size_t n = 0;
  for (const auto* list : {&groups, &ablation}) {
    for (const auto& g : *list) {
      for (const auto& r : g.runs) n += r.error ? 1 : 0;
    }
  }
  return n;
}

MethodConfig method_from_name(std::string_view name) {
  try {
    return {std::string(name), GeneratorParams::preset(parse_generator_kind(name))};
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
}

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

MethodConfig parse_method(const Json& doc) {
  if (doc.is_string()) return method_from_name(doc.get<std::string>());
  if (!doc.is_object() || !doc.contains("kind")) config_error("method entries are names or objects with a kind");
  MethodConfig m = method_from_name(doc.at("kind").get<std::string>());
  for (const auto& [key, value] : doc.items()) {
    if (key == "kind") continue;
    if (key == "name") m.name = value.get<std::string>();
    else if (key == "max_train_rows") m.params.max_train_rows = value.get<std::size_t>();
    else if (key == "max_conditioning_cols") m.params.max_conditioning_cols = value.get<std::size_t>();
    else if (key == "n_trees") m.params.forest.n_trees = value.get<std::size_t>();
    else if (key == "n_rounds") m.params.gbt.n_rounds = value.get<std::size_t>();
    else if (key == "learning_rate") m.params.gbt.learning_rate = value.get<double>();
    else if (key == "max_depth") {
      m.params.forest.max_depth = value.get<int>();
      m.params.gbt.max_depth = value.get<int>();
    } else {
      config_error("unknown method field '" + key + "'");
    }
  }
  if (m.params.max_train_rows == 0) config_error("max_train_rows must be at least 1");
  return m;
}

}  // namespace

ExperimentConfig parse_config(std::string_view document, const std::filesystem::path& base_dir) {
  Json doc;
  try {
    doc = Json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object()) config_error("config must be a JSON object");
    static const std::set<std::string> known = {"datasets", "methods", "seeds", "synthetic_rows", "test_fraction",
                                                "output_dir", "feedback", "max_iterations", "ablation"};
    for (const auto& [key, value] : doc.items()) {
      if (!known.contains(key)) config_error("unknown config field '" + key + "'");
    }
    ExperimentConfig cfg;
    for (const auto& d : doc.at("datasets")) {
      DatasetConfig ds;
      ds.name = d.at("name").get<std::string>();
      ds.display = d.value("display", ds.name);
      ds.data = resolve(base_dir, d.at("data").get<std::string>());
      if (d.contains("corpus")) ds.corpus = resolve(base_dir, d.at("corpus").get<std::string>());
      if (d.contains("rule")) ds.rule = resolve(base_dir, d.at("rule").get<std::string>());
      ds.target = d.at("target").get<std::string>();
      if (d.contains("positive")) ds.positive_label = d.at("positive").get<std::string>();
      if (ds.rule && !ds.corpus) config_error("dataset '" + ds.name + "' has a rule but no corpus");
      for (const auto& other : cfg.datasets) {
        if (other.name == ds.name) config_error("duplicate dataset '" + ds.name + "'");
      }
      cfg.datasets.push_back(std::move(ds));
    }
    for (const auto& m : doc.at("methods")) cfg.methods.push_back(parse_method(m));
    cfg.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    cfg.synthetic_rows = doc.value("synthetic_rows", cfg.synthetic_rows);
    cfg.test_fraction = doc.value("test_fraction", cfg.test_fraction);
    if (doc.contains("output_dir")) cfg.output_dir = resolve(base_dir, doc.at("output_dir").get<std::string>());
    cfg.feedback = doc.value("feedback", false);
    cfg.max_iterations = doc.value("max_iterations", cfg.max_iterations);

    if (cfg.datasets.empty()) config_error("config lists no datasets");
    if (cfg.methods.empty()) config_error("config lists no methods");
    if (cfg.seeds.empty()) config_error("config lists no seeds");
    if (cfg.synthetic_rows == 0) config_error("synthetic_rows must be at least 1");
    if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) config_error("test_fraction must lie in (0, 1)");
    if (cfg.max_iterations == 0) config_error("max_iterations must be at least 1");

    if (doc.contains("ablation")) {
      const auto& a = doc.at("ablation");
      AblationConfig ab;
      ab.method = parse_method(a.value("method", Json("seq-gbt")));
      ab.datasets = a.at("datasets").get<std::vector<std::string>>();
      for (const auto& name : ab.datasets) cfg.dataset(name);
      if (a.contains("settings")) {
        for (const auto& s : a.at("settings")) {
          ab.settings.push_back({s.at("name").get<std::string>(), s.at("max_train_rows").get<std::size_t>(),
                                 s.at("max_conditioning_cols").get<std::size_t>()});
        }
      } else {
        ab.settings = default_ablation_settings();
      }
      cfg.ablation = std::move(ab);
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("malformed config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

EvalReport mean_report(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw Error(ErrorKind::EmptyInput, "no reports to average");
  const double n = static_cast<double>(reports.size());
  auto mean_of = [&](auto field) {
    double s = 0.0;
    for (const auto& r : reports) s += field(r);
    return s / n;
  };
  auto mean_opt = [&](auto field) -> std::optional<double> {
    double s = 0.0;
    for (const auto& r : reports) {
      const std::optional<double>& v = field(r);
      if (!v) return std::nullopt;
      s += *v;
    }
    return s / n;
  };
  EvalReport m;
  m.trtr.accuracy = mean_of([](const EvalReport& r) { return r.trtr.accuracy; });
  m.trtr.f1 = mean_of([](const EvalReport& r) { return r.trtr.f1; });
  m.trtr.auroc = mean_of([](const EvalReport& r) { return r.trtr.auroc; });
  m.tstr.accuracy = mean_of([](const EvalReport& r) { return r.tstr.accuracy; });
  m.tstr.f1 = mean_of([](const EvalReport& r) { return r.tstr.f1; });
  m.tstr.auroc = mean_of([](const EvalReport& r) { return r.tstr.auroc; });
  m.gap = utility_gap(m.tstr, m.trtr);
  m.numeric_mean_diff = mean_opt([](const EvalReport& r) -> const std::optional<double>& { return r.numeric_mean_diff; });
  m.numeric_std_diff = mean_opt([](const EvalReport& r) -> const std::optional<double>& { return r.numeric_std_diff; });
  m.categorical_tvd = mean_opt([](const EvalReport& r) -> const std::optional<double>& { return r.categorical_tvd; });
  m.xmodal = mean_opt([](const EvalReport& r) -> const std::optional<double>& { return r.xmodal; });
  return m;
}

namespace {

struct LoadedDataset {
  const DatasetConfig* config = nullptr;
  Table table;
  std::optional<TextCorpus> corpus;
  std::optional<RuleSpec> rule;
};

struct Prepared {
  Table train;
  Table test;
  std::string positive;
  std::map<Sentiment, double> frequencies;
  UtilityScores trtr;
};

struct Cell {
  std::size_t dataset = 0;  // index into loaded datasets
  std::size_t seed = 0;     // index into config.seeds
  MethodConfig method;
  std::string setting;
};

LoadedDataset load_dataset(const DatasetConfig& ds) {
  LoadedDataset out;
  out.config = &ds;
  out.table = load_table(ds.data);
  if (ds.rule) {
    out.rule = load_rule(*ds.rule);
    out.corpus = load_corpus(*ds.corpus);
    if (out.rule->target_column != ds.target) {
      config_error("dataset '" + ds.name + "' targets '" + ds.target + "' but its rule targets '" +
                   out.rule->target_column + "'");
    }
    if (const auto findings = validate_rule(*out.rule, out.table.schema()); !findings.empty()) {
      throw Error(ErrorKind::InvalidRule, "rule for '" + ds.name + "': " + findings.front().detail);
    }
  }
  resolve_positive_label(out.table, ds.target, ds.positive_label);
  return out;
}

Prepared prepare(const LoadedDataset& d, const ExperimentConfig& cfg, std::uint64_t seed) {
  Prepared p;
  Table full = d.table;
  if (d.rule) {
    full = compose_weak_benchmark(full, *d.corpus, *d.rule, seed);
    if (d.rule->text_column) full = full.drop_column(*d.rule->text_column);
    p.frequencies = d.corpus->label_frequencies();
  }
  auto parts = split(full, cfg.test_fraction, seed, d.config->target);
  p.train = std::move(parts.train);
  p.test = std::move(parts.test);
  p.positive = resolve_positive_label(p.test, d.config->target, d.config->positive_label);
  UtilityOptions utility;
  utility.positive_label = p.positive;
  p.trtr = eval_utility(p.train, p.test, d.config->target, utility);
  return p;
}

RunRecord run_cell(const Cell& cell, const LoadedDataset& d, const Prepared& p, const ExperimentConfig& cfg, Exec exec) {
  RunRecord rec;
  rec.dataset = d.config->name;
  rec.method = cell.method.name;
  rec.setting = cell.setting;
  rec.seed = cfg.seeds[cell.seed];
  try {
    ReportOptions opts;
    opts.utility.positive_label = p.positive;
    opts.trtr = p.trtr;
    SynthesisRoles roles{d.config->target, std::nullopt};
    if (d.rule) roles.sentiment = d.rule->sentiment_column;
    const RuleSpec* rule = d.rule ? &*d.rule : nullptr;

    if (cfg.feedback && rule) {
      ReconcileOptions ro;
      ro.max_iterations = cfg.max_iterations;
      ro.rows = cfg.synthetic_rows;
      ro.report = opts;
      ro.label_frequencies = p.frequencies;
      ro.exec = exec;
      auto result = reconcile(p.train, p.test, *rule, cell.method.params, ro, rec.seed);
      rec.report = result.report;
      rec.synthetic_rows = result.table.rows();
      TrailSummary trail;
      for (const auto& e : result.trail.entries) trail.signals.emplace_back(to_string(e.signal.kind));
      trail.accepted = result.trail.accepted();
      rec.trail = std::move(trail);
    } else {
      const auto model = fit_generator(p.train, cell.method.params, rec.seed, roles, exec);
      const Table syn = sample_rows(model, cfg.synthetic_rows, derive_seed(rec.seed, "sample"), exec);
      rec.synthetic_rows = syn.rows();
      rec.report = build_report(p.train, p.test, syn, d.config->target, rule, opts);
    }
  } catch (const Error& e) {
    rec.error = e.what();
  }
  return rec;
}

ReportSet run_grid(const ExperimentConfig& cfg, bool main_grid, bool ablation_grid, Exec exec) {
  if (ablation_grid && !cfg.ablation) config_error("config has no ablation section");

  std::vector<std::string> used;
  auto use = [&](const std::string& name) {
    if (std::find(used.begin(), used.end(), name) == used.end()) used.push_back(name);
  };
  if (main_grid) {
    for (const auto& d : cfg.datasets) use(d.name);
  }
  if (ablation_grid) {
    for (const auto& name : cfg.ablation->datasets) use(name);
  }

  std::vector<LoadedDataset> loaded;
  for (const auto& name : used) loaded.push_back(load_dataset(cfg.dataset(name)));
  auto index_of = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(used.begin(), used.end(), name) - used.begin());
  };

  const std::size_t n_seeds = cfg.seeds.size();
  std::vector<Prepared> prepared(loaded.size() * n_seeds);
  for_each_index(prepared.size(), exec, [&](std::size_t k) {
    prepared[k] = prepare(loaded[k / n_seeds], cfg, cfg.seeds[k % n_seeds]);
  });

  std::vector<Cell> cells;
  if (main_grid) {
    for (const auto& d : cfg.datasets) {
      for (const auto& m : cfg.methods) {
        for (std::size_t s = 0; s < n_seeds; ++s) cells.push_back({index_of(d.name), s, m, "default"});
      }
    }
  }
  const std::size_t main_cells = cells.size();
  if (ablation_grid) {
    for (const auto& name : cfg.ablation->datasets) {
      for (const auto& setting : cfg.ablation->settings) {
        MethodConfig m = cfg.ablation->method;
        m.params.max_train_rows = setting.max_train_rows;
        m.params.max_conditioning_cols = setting.max_conditioning_cols;
        for (std::size_t s = 0; s < n_seeds; ++s) cells.push_back({index_of(name), s, m, setting.name});
      }
    }
  }

  std::vector<RunRecord> records(cells.size());
  for_each_index(cells.size(), exec, [&](std::size_t k) {
    const auto& c = cells[k];
    records[k] = run_cell(c, loaded[c.dataset], prepared[c.dataset * n_seeds + c.seed], cfg, exec);
  });

  ReportSet set;
  set.seeds = cfg.seeds;
  auto collect = [&](std::size_t begin, std::size_t end, std::vector<ReportGroup>& out) {
    for (std::size_t k = begin; k < end; k += n_seeds) {
      const auto& d = *loaded[cells[k].dataset].config;
      ReportGroup g;
      g.dataset = d.name;
      g.display = d.display;
      g.weak = d.weak();
      g.method = cells[k].method.name;
      g.setting = cells[k].setting;
      std::vector<EvalReport> ok;
      for (std::size_t s = 0; s < n_seeds; ++s) {
        g.runs.push_back(records[k + s]);
        if (records[k + s].report) ok.push_back(*records[k + s].report);
      }
      if (!ok.empty()) g.mean = mean_report(ok);
      out.push_back(std::move(g));
    }
  };
  collect(0, main_cells, set.groups);
  collect(main_cells, cells.size(), set.ablation);
  return set;
}

}  // namespace

ReportSet run_benchmark(const ExperimentConfig& config, Exec exec) { return run_grid(config, true, false, exec); }
ReportSet run_ablation(const ExperimentConfig& config, Exec exec) { return run_grid(config, false, true, exec); }
ReportSet run_all(const ExperimentConfig& config, Exec exec) {
  return run_grid(config, true, config.ablation.has_value(), exec);
}

}  // namespace htdbu
