#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <zlib.h>

#include "autoboost/csv.hpp"
#include "autoboost/pipeline.hpp"

namespace autoboost {

using nlohmann::json;

namespace {

constexpr const char* kFormatName = "autoboost-pipeline";

json num(double v) { return csv::format_double(v); }

std::string threshold_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double to_num(const json& j) {
  auto v = csv::parse_double(j.get<std::string>());
  if (!v) throw BundleError(BundleError::Kind::Corrupt, "bundle: bad number '" + j.get<std::string>() + "'");
  return *v;
}

json nums(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

Eigen::VectorXd to_vector(const json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = to_num(a[i]);
  return v;
}

std::vector<double> to_std_vector(const json& a) {
  std::vector<double> v;
  v.reserve(a.size());
  for (const auto& x : a) v.push_back(to_num(x));
  return v;
}

json tree_node(const gbt::Tree& tree, int id) {
  const gbt::Node& n = tree.nodes[static_cast<std::size_t>(id)];
  if (n.is_leaf()) return json{{"leaf", num(n.value)}};
  return json{{"feature", n.feature},
              {"threshold", threshold_text(n.threshold)},
              {"default", n.default_left ? "left" : "right"},
              {"gain", num(n.gain)},
              {"left", tree_node(tree, n.left)},
              {"right", tree_node(tree, n.right)}};
}

// Rebuilds breadth-first, which is the order trees are grown in.
gbt::Tree read_tree(const json& root) {
  gbt::Tree tree;
  std::deque<std::pair<const json*, int>> queue;
  tree.nodes.emplace_back();
  queue.emplace_back(&root, 0);
  while (!queue.empty()) {
    auto [j, id] = queue.front();
    queue.pop_front();
    gbt::Node node;
    if (j->contains("leaf")) {
      node.value = to_num(j->at("leaf"));
    } else {
      node.feature = j->at("feature").get<int>();
      node.threshold = to_num(j->at("threshold"));
      node.default_left = j->at("default").get<std::string>() == "left";
      node.gain = to_num(j->at("gain"));
      node.left = static_cast<int>(tree.nodes.size());
      node.right = node.left + 1;
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      queue.emplace_back(&j->at("left"), node.left);
      queue.emplace_back(&j->at("right"), node.right);
    }
    tree.nodes[static_cast<std::size_t>(id)] = node;
  }
  return tree;
}

json payload_of(const PipelineModel& p) {
  json schema = json::array();
  for (std::size_t j = 0; j < p.schema.names.size(); ++j) {
    schema.push_back({{"name", p.schema.names[j]},
                      {"kind", p.schema.kinds[j] == ColumnKind::Numeric ? "numeric" : "categorical"}});
  }

  json columns = json::array();
  for (const auto& c : p.encoders.columns) {
    columns.push_back({{"name", c.name},
                       {"strategy", encoding::to_string(c.strategy)},
                       {"levels", c.levels},
                       {"values", nums(c.values)},
                       {"fallback", nums(c.fallback)},
                       {"width", c.width}});
  }

  json trees = json::array();
  for (const auto& t : p.model.trees) trees.push_back(tree_node(t, 0));

  const auto& c = p.config;
  json history = json::array();
  for (const auto& e : p.history) {
    history.push_back({{"point", nums(e.point)},
                       {"values", nums(e.values)},
                       {"objective", num(e.objective)},
                       {"value", num(e.value)},
                       {"seconds", num(e.seconds)}});
  }

  return json{
      {"task", to_string(p.task)},
      {"target", p.target_name},
      {"classes", p.classes},
      {"measure", to_string(p.measure)},
      {"schema", schema},
      {"encoders",
       {{"k", p.encoders.k},
        {"high_card", encoding::to_string(p.encoders.high_card)},
        {"smoothing", num(p.encoders.smoothing)},
        {"columns", columns}}},
      {"model",
       {{"task", to_string(p.model.task)},
        {"n_classes", p.model.n_classes},
        {"n_outputs", p.model.n_outputs},
        {"n_features", p.model.n_features},
        {"base_score", nums(p.model.base_score)},
        {"best_iteration", p.model.best_iteration},
        {"valid_history", nums(p.model.valid_history)},
        {"trees", trees}}},
      {"thresholds", p.thresholds ? nums(p.thresholds->values) : json(nullptr)},
      {"config",
       {{"eta", num(c.eta)},
        {"gamma", num(c.gamma)},
        {"max_depth", c.max_depth},
        {"colsample_bytree", num(c.colsample_bytree)},
        {"colsample_bylevel", num(c.colsample_bylevel)},
        {"lambda", num(c.lambda)},
        {"alpha", num(c.alpha)},
        {"subsample", num(c.subsample)},
        {"max_rounds", c.max_rounds},
        {"patience", c.patience},
        {"min_child_weight", num(c.min_child_weight)},
        {"seed", std::to_string(c.seed)}}},
      {"validation_value", num(p.validation_value)},
      {"split_seed", std::to_string(p.split_seed)},
      {"validation_rows", p.validation_rows},
      {"param_names", p.param_names},
      {"history", history},
  };
}

PipelineModel model_of(const json& j, int version) {
  PipelineModel p;
  p.format_version = version;
  p.task = parse_task(j.at("task").get<std::string>());
  p.target_name = j.at("target").get<std::string>();
  p.classes = j.at("classes").get<std::vector<std::string>>();
  p.measure = parse_measure(j.at("measure").get<std::string>());
  for (const auto& s : j.at("schema")) {
    p.schema.names.push_back(s.at("name").get<std::string>());
    p.schema.kinds.push_back(s.at("kind").get<std::string>() == "numeric" ? ColumnKind::Numeric
                                                                         : ColumnKind::Categorical);
  }

  const auto& enc = j.at("encoders");
  p.encoders.k = enc.at("k").get<int>();
  p.encoders.high_card = encoding::parse_strategy(enc.at("high_card").get<std::string>());
  p.encoders.smoothing = to_num(enc.at("smoothing"));
  for (const auto& c : enc.at("columns")) {
    encoding::ColumnEncoder ce;
    ce.name = c.at("name").get<std::string>();
    ce.strategy = encoding::parse_strategy(c.at("strategy").get<std::string>());
    ce.levels = c.at("levels").get<std::vector<std::string>>();
    ce.values = to_std_vector(c.at("values"));
    ce.fallback = to_std_vector(c.at("fallback"));
    ce.width = c.at("width").get<int>();
    p.encoders.columns.push_back(std::move(ce));
  }

  const auto& m = j.at("model");
  p.model.task = parse_task(m.at("task").get<std::string>());
  p.model.n_classes = m.at("n_classes").get<int>();
  p.model.n_outputs = m.at("n_outputs").get<int>();
  p.model.n_features = m.at("n_features").get<int>();
  p.model.base_score = to_vector(m.at("base_score"));
  p.model.best_iteration = m.at("best_iteration").get<int>();
  p.model.valid_history = to_std_vector(m.at("valid_history"));
  for (const auto& t : m.at("trees")) p.model.trees.push_back(read_tree(t));

  if (!j.at("thresholds").is_null()) p.thresholds = threshold::ThresholdVector{to_vector(j.at("thresholds"))};

  const auto& c = j.at("config");
  p.config.eta = to_num(c.at("eta"));
  p.config.gamma = to_num(c.at("gamma"));
  p.config.max_depth = c.at("max_depth").get<int>();
  p.config.colsample_bytree = to_num(c.at("colsample_bytree"));
  p.config.colsample_bylevel = to_num(c.at("colsample_bylevel"));
  p.config.lambda = to_num(c.at("lambda"));
  p.config.alpha = to_num(c.at("alpha"));
  p.config.subsample = to_num(c.at("subsample"));
  p.config.max_rounds = c.at("max_rounds").get<int>();
  p.config.patience = c.at("patience").get<int>();
  p.config.min_child_weight = to_num(c.at("min_child_weight"));
  p.config.seed = std::stoull(c.at("seed").get<std::string>());

  p.validation_value = to_num(j.at("validation_value"));
  p.split_seed = std::stoull(j.at("split_seed").get<std::string>());
  p.validation_rows = j.at("validation_rows").get<std::vector<std::size_t>>();
  p.param_names = j.at("param_names").get<std::vector<std::string>>();
  for (const auto& h : j.at("history")) {
    smbo::Evaluation e;
    e.point = to_vector(h.at("point"));
    e.values = to_vector(h.at("values"));
    e.objective = to_num(h.at("objective"));
    e.value = to_num(h.at("value"));
    e.seconds = to_num(h.at("seconds"));
    p.history.push_back(std::move(e));
  }
  return p;
}

std::string crc_hex(const std::string& text) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(text.data()), static_cast<uInt>(text.size()));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

}  // namespace

std::string to_bundle(const PipelineModel& p) {
  const json payload = payload_of(p);
  json doc{{"format", kFormatName},
           {"version", kBundleFormatVersion},
           {"crc32", crc_hex(payload.dump())},
           {"payload", payload}};
  return doc.dump(1) + "\n";
}

PipelineModel from_bundle(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw BundleError(BundleError::Kind::Corrupt, "bundle: checksum failed (unreadable or truncated document)");
  }
  if (doc.value("format", "") != kFormatName) {
    throw BundleError(BundleError::Kind::Corrupt, "bundle: not an autoboost pipeline");
  }
  if (!doc.contains("version") || !doc["version"].is_number_integer()) {
    throw BundleError(BundleError::Kind::Corrupt, "bundle: missing format version");
  }
  const int version = doc["version"].get<int>();
  if (version != kBundleFormatVersion) {
    throw BundleError(BundleError::Kind::Version,
                      "bundle: format version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kBundleFormatVersion) + ")");
  }
  if (!doc.contains("payload") || !doc.contains("crc32") || crc_hex(doc["payload"].dump()) != doc["crc32"]) {
    throw BundleError(BundleError::Kind::Corrupt, "bundle: checksum mismatch");
  }
  try {
    return model_of(doc["payload"], version);
  } catch (const json::exception& e) {
    throw BundleError(BundleError::Kind::Corrupt, std::string("bundle: malformed payload: ") + e.what());
  }
}

void save(const PipelineModel& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << to_bundle(p);
  if (!out) throw DataError("failed writing " + path);
}

PipelineModel load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_bundle(ss.str());
}

}  // namespace autoboost
