#include "htdbu/model_io.hpp"

#include <fstream>
#include <sstream>

#include "htdbu/error.hpp"

namespace htdbu {

namespace {

std::string_view task_name(TreeTask t) { return t == TreeTask::Classification ? "classification" : "regression"; }

TreeTask parse_task(const std::string& s) {
  if (s == "classification") return TreeTask::Classification;
  if (s == "regression") return TreeTask::Regression;
  throw Error(ErrorKind::ParseError, "unknown tree task '" + s + "'");
}

ColumnKind parse_kind(const std::string& s) {
  if (s == "numeric") return ColumnKind::Numeric;
  if (s == "categorical") return ColumnKind::Categorical;
  throw Error(ErrorKind::ParseError, "unknown column kind '" + s + "'");
}

std::string kind_name(ColumnKind k) { return k == ColumnKind::Numeric ? "numeric" : "categorical"; }

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& doc) {
  const auto n = static_cast<Eigen::Index>(doc.size());
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = doc.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != n) throw Error(ErrorKind::ParseError, "matrix is not square");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

Json tree_params_to_json(const TreeParams& p) {
  return Json{{"max_depth", p.max_depth}, {"min_leaf", p.min_leaf}, {"max_features", p.max_features}};
}

TreeParams tree_params_from_json(const Json& doc) {
  TreeParams p;
  p.max_depth = doc.at("max_depth").get<int>();
  p.min_leaf = doc.at("min_leaf").get<std::size_t>();
  p.max_features = doc.at("max_features").get<std::size_t>();
  return p;
}

Json forest_params_to_json(const ForestParams& p) {
  Json doc{{"n_trees", p.n_trees}, {"max_depth", p.max_depth}, {"min_leaf", p.min_leaf}};
  doc["max_features"] = p.max_features ? Json(*p.max_features) : Json(nullptr);
  return doc;
}

ForestParams forest_params_from_json(const Json& doc) {
  ForestParams p;
  p.n_trees = doc.at("n_trees").get<std::size_t>();
  p.max_depth = doc.at("max_depth").get<int>();
  p.min_leaf = doc.at("min_leaf").get<std::size_t>();
  if (!doc.at("max_features").is_null()) p.max_features = doc.at("max_features").get<std::size_t>();
  return p;
}

Json gbt_params_to_json(const GbtParams& p) {
  return Json{{"n_rounds", p.n_rounds},
              {"max_depth", p.max_depth},
              {"learning_rate", p.learning_rate},
              {"min_leaf", p.min_leaf},
              {"l2", p.l2}};
}

GbtParams gbt_params_from_json(const Json& doc) {
  GbtParams p;
  p.n_rounds = doc.at("n_rounds").get<std::size_t>();
  p.max_depth = doc.at("max_depth").get<int>();
  p.learning_rate = doc.at("learning_rate").get<double>();
  p.min_leaf = doc.at("min_leaf").get<std::size_t>();
  p.l2 = doc.at("l2").get<double>();
  return p;
}

template <class Fn>
auto guarded(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed model document: ") + e.what());
  }
}

}  // namespace

Json schema_to_json(const Schema& schema) {
  Json cols = Json::array();
  for (const auto& c : schema.columns()) {
    Json col{{"name", c.name}, {"kind", kind_name(c.kind)}};
    if (c.is_categorical()) col["categories"] = c.categories;
    cols.push_back(std::move(col));
  }
  return cols;
}

Schema schema_from_json(const Json& doc) {
  return guarded([&] {
    std::vector<ColumnSpec> cols;
    for (const auto& c : doc) {
      ColumnSpec spec;
      spec.name = c.at("name").get<std::string>();
      spec.kind = parse_kind(c.at("kind").get<std::string>());
      if (spec.is_categorical()) spec.categories = c.at("categories").get<std::vector<std::string>>();
      cols.push_back(std::move(spec));
    }
    return Schema(std::move(cols));
  });
}

Json tree_to_json(const TreeModel& tree) {
  Json feature = Json::array(), threshold = Json::array(), left = Json::array(), right = Json::array(),
       value = Json::array(), counts = Json::array(), samples = Json::array();
  for (const auto& n : tree.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
    counts.push_back(n.class_counts);
    samples.push_back(n.samples);
  }
  return Json{{"task", task_name(tree.task)}, {"n_classes", tree.n_classes}, {"params", tree_params_to_json(tree.params)},
              {"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right},
              {"value", value}, {"class_counts", counts}, {"samples", samples}};
}

TreeModel tree_from_json(const Json& doc) {
  return guarded([&] {
    TreeModel t;
    t.task = parse_task(doc.at("task").get<std::string>());
    t.n_classes = doc.at("n_classes").get<std::size_t>();
    t.params = tree_params_from_json(doc.at("params"));
    const auto& feature = doc.at("feature");
    t.nodes.resize(feature.size());
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
      auto& n = t.nodes[i];
      n.feature = feature.at(i).get<std::int32_t>();
      n.threshold = doc.at("threshold").at(i).get<double>();
      n.left = doc.at("left").at(i).get<std::int32_t>();
      n.right = doc.at("right").at(i).get<std::int32_t>();
      n.value = doc.at("value").at(i).get<double>();
      n.class_counts = doc.at("class_counts").at(i).get<std::vector<double>>();
      n.samples = doc.at("samples").at(i).get<std::vector<double>>();
    }
    return t;
  });
}

Json forest_to_json(const ForestModel& forest) {
  Json trees = Json::array();
  for (const auto& t : forest.trees) trees.push_back(tree_to_json(t));
  return Json{{"task", task_name(forest.task)}, {"n_classes", forest.n_classes}, {"n_features", forest.n_features},
              {"tree_seeds", forest.tree_seeds}, {"trees", trees}};
}

ForestModel forest_from_json(const Json& doc) {
  return guarded([&] {
    ForestModel f;
    f.task = parse_task(doc.at("task").get<std::string>());
    f.n_classes = doc.at("n_classes").get<std::size_t>();
    f.n_features = doc.at("n_features").get<std::size_t>();
    f.tree_seeds = doc.at("tree_seeds").get<std::vector<std::uint64_t>>();
    for (const auto& t : doc.at("trees")) f.trees.push_back(tree_from_json(t));
    return f;
  });
}

Json gbt_to_json(const GbtModel& gbt) {
  Json trees = Json::array();
  for (const auto& seq : gbt.trees) {
    Json s = Json::array();
    for (const auto& t : seq) s.push_back(tree_to_json(t));
    trees.push_back(std::move(s));
  }
  Json doc{{"task", task_name(gbt.task)}, {"n_classes", gbt.n_classes}, {"n_features", gbt.n_features},
           {"params", gbt_params_to_json(gbt.params)}, {"base_score", gbt.base_score}};
  doc["constant_class"] = gbt.constant_class ? Json(*gbt.constant_class) : Json(nullptr);
  doc["residuals"] = gbt.residuals;
  doc["trees"] = std::move(trees);
  return doc;
}

GbtModel gbt_from_json(const Json& doc) {
  return guarded([&] {
    GbtModel g;
    g.task = parse_task(doc.at("task").get<std::string>());
    g.n_classes = doc.at("n_classes").get<std::size_t>();
    g.n_features = doc.at("n_features").get<std::size_t>();
    g.params = gbt_params_from_json(doc.at("params"));
    g.base_score = doc.at("base_score").get<std::vector<double>>();
    if (!doc.at("constant_class").is_null()) g.constant_class = doc.at("constant_class").get<std::int32_t>();
    g.residuals = doc.at("residuals").get<std::vector<double>>();
    for (const auto& seq : doc.at("trees")) {
      std::vector<TreeModel> s;
      for (const auto& t : seq) s.push_back(tree_from_json(t));
      g.trees.push_back(std::move(s));
    }
    return g;
  });
}

Json copula_to_json(const CopulaModel& copula) {
  Json marginals = Json::array();
  for (const auto& m : copula.marginals) {
    Json j{{"kind", kind_name(m.kind)}, {"constant", m.constant}};
    if (m.kind == ColumnKind::Numeric) {
      j["sorted"] = m.sorted;
    } else {
      j["cuts"] = m.cuts;
    }
    marginals.push_back(std::move(j));
  }
  return Json{{"schema", schema_to_json(copula.schema)}, {"marginals", marginals},
              {"correlation", matrix_to_json(copula.correlation)}, {"factor", matrix_to_json(copula.factor)}};
}

CopulaModel copula_from_json(const Json& doc) {
  return guarded([&] {
    CopulaModel c;
    c.schema = schema_from_json(doc.at("schema"));
    for (const auto& j : doc.at("marginals")) {
      CopulaMarginal m;
      m.kind = parse_kind(j.at("kind").get<std::string>());
      m.constant = j.at("constant").get<bool>();
      if (m.kind == ColumnKind::Numeric) {
        m.sorted = j.at("sorted").get<std::vector<double>>();
      } else {
        m.cuts = j.at("cuts").get<std::vector<double>>();
      }
      c.marginals.push_back(std::move(m));
    }
    c.correlation = matrix_from_json(doc.at("correlation"));
    c.factor = matrix_from_json(doc.at("factor"));
    return c;
  });
}

Json logistic_to_json(const LogisticModel& model) {
  Json blocks = Json::array();
  for (const auto& b : model.encoder.blocks) {
    Json j{{"column", b.column}, {"kind", kind_name(b.kind)}, {"offset", b.offset}};
    if (b.kind == ColumnKind::Numeric) {
      j["mean"] = b.mean;
      j["scale"] = b.scale;
    } else {
      j["labels"] = b.labels;
    }
    blocks.push_back(std::move(j));
  }
  Json doc{{"target", model.target}, {"positive_label", model.positive_label}, {"dim", model.encoder.dim},
           {"blocks", blocks}, {"weights", model.weights}, {"bias", model.bias}};
  doc["constant"] = model.constant ? Json(*model.constant) : Json(nullptr);
  return doc;
}

LogisticModel logistic_from_json(const Json& doc) {
  return guarded([&] {
    LogisticModel m;
    m.target = doc.at("target").get<std::string>();
    m.positive_label = doc.at("positive_label").get<std::string>();
    m.encoder.dim = doc.at("dim").get<std::size_t>();
    for (const auto& j : doc.at("blocks")) {
      FeatureEncoder::Block b;
      b.column = j.at("column").get<std::string>();
      b.kind = parse_kind(j.at("kind").get<std::string>());
      b.offset = j.at("offset").get<std::size_t>();
      if (b.kind == ColumnKind::Numeric) {
        b.mean = j.at("mean").get<double>();
        b.scale = j.at("scale").get<double>();
      } else {
        b.labels = j.at("labels").get<std::vector<std::string>>();
      }
      m.encoder.blocks.push_back(std::move(b));
    }
    m.weights = doc.at("weights").get<std::vector<double>>();
    m.bias = doc.at("bias").get<double>();
    if (!doc.at("constant").is_null()) m.constant = doc.at("constant").get<double>();
    return m;
  });
}

Json generator_to_json(const GeneratorModel& model) {
  const auto& p = model.params;
  Json params{{"kind", to_string(p.kind)},
              {"max_train_rows", p.max_train_rows},
              {"max_conditioning_cols", p.max_conditioning_cols},
              {"forest", forest_params_to_json(p.forest)},
              {"gbt", gbt_params_to_json(p.gbt)}};
  Json marginals = Json::array();
  for (const auto& m : model.marginals) {
    Json j{{"kind", kind_name(m.kind)}};
    if (m.kind == ColumnKind::Numeric) {
      j["values"] = m.values;
    } else {
      j["weights"] = m.weights;
    }
    marginals.push_back(std::move(j));
  }
  Json conditionals = Json::array();
  for (const auto& c : model.conditionals) {
    Json j{{"column", c.column}, {"conditioning", c.conditioning}, {"min", c.min}, {"max", c.max}};
    if (c.forest) j["forest"] = forest_to_json(*c.forest);
    if (c.gbt) j["gbt"] = gbt_to_json(*c.gbt);
    conditionals.push_back(std::move(j));
  }
  Json doc{{"format", kModelFormat}, {"schema", schema_to_json(model.schema)}, {"params", params},
           {"order", model.order}, {"marginals", marginals}};
  doc["copula"] = model.copula ? copula_to_json(*model.copula) : Json(nullptr);
  doc["conditionals"] = std::move(conditionals);
  return doc;
}

GeneratorModel generator_from_json(const Json& doc) {
  return guarded([&] {
    if (!doc.is_object() || doc.value("format", std::string{}) != kModelFormat) {
      throw Error(ErrorKind::ParseError, "not an " + std::string(kModelFormat) + " document");
    }
    GeneratorModel m;
    m.schema = schema_from_json(doc.at("schema"));
    const auto& p = doc.at("params");
    try {
      m.params.kind = parse_generator_kind(p.at("kind").get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError, e.what());
    }
    m.params.max_train_rows = p.at("max_train_rows").get<std::size_t>();
    m.params.max_conditioning_cols = p.at("max_conditioning_cols").get<std::size_t>();
    m.params.forest = forest_params_from_json(p.at("forest"));
    m.params.gbt = gbt_params_from_json(p.at("gbt"));
    m.order = doc.at("order").get<std::vector<std::size_t>>();
    for (const auto& j : doc.at("marginals")) {
      Marginal mg;
      mg.kind = parse_kind(j.at("kind").get<std::string>());
      if (mg.kind == ColumnKind::Numeric) {
        mg.values = j.at("values").get<std::vector<double>>();
      } else {
        mg.weights = j.at("weights").get<std::vector<double>>();
      }
      m.marginals.push_back(std::move(mg));
    }
    if (!doc.at("copula").is_null()) m.copula = copula_from_json(doc.at("copula"));
    for (const auto& j : doc.at("conditionals")) {
      ConditionalModel c;
      c.column = j.at("column").get<std::size_t>();
      c.conditioning = j.at("conditioning").get<std::vector<std::size_t>>();
      c.min = j.at("min").get<double>();
      c.max = j.at("max").get<double>();
      if (j.contains("forest")) c.forest = forest_from_json(j.at("forest"));
      if (j.contains("gbt")) c.gbt = gbt_from_json(j.at("gbt"));
      m.conditionals.push_back(std::move(c));
    }
    const std::size_t d = m.schema.size();
    if (m.order.size() != d || m.marginals.size() != d) {
      throw Error(ErrorKind::ParseError, "model order/marginals do not match its schema");
    }
    return m;
  });
}

std::string serialize_model(const GeneratorModel& model) { return generator_to_json(model).dump() + "\n"; }

GeneratorModel parse_model(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("model is not valid JSON: ") + e.what());
  }
  return generator_from_json(doc);
}

void save_model(const GeneratorModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IOError, "cannot write " + path.string());
  out << serialize_model(model);
  if (!out) throw Error(ErrorKind::IOError, "failed writing " + path.string());
}

GeneratorModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace htdbu
