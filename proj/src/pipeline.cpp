#include "autoboost/pipeline.hpp"

#include <chrono>
#include <limits>
#include <stdexcept>

namespace autoboost {

void AutoConfig::validate() const {
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
  if (!(deadline >= 0.0)) throw std::invalid_argument("deadline must be >= 0");
  if (!(valid_fraction > 0.0 && valid_fraction < 1.0)) throw std::invalid_argument("valid_fraction must lie in (0,1)");
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  if (high_card != encoding::Strategy::Integer && high_card != encoding::Strategy::Impact) {
    throw std::invalid_argument("high-cardinality strategy must be integer or impact");
  }
  if (!(smoothing >= 0.0)) throw std::invalid_argument("smoothing must be >= 0");
  if (max_rounds < 1 || patience < 1) throw std::invalid_argument("max_rounds and patience must be >= 1");
  if (n_init < 1) throw std::invalid_argument("n_init must be >= 1");
  if (gsa_iters < 1) throw std::invalid_argument("gsa_iters must be >= 1");
}

namespace {

std::vector<int> codes_of(const Dataset& d) { return d.target().codes; }

struct Scored {
  double value = std::numeric_limits<double>::infinity();
  std::optional<threshold::ThresholdVector> thresholds;
};

Scored score_predictions(Task task, Measure measure, const Eigen::MatrixXd& pred, const Dataset& valid,
                         int gsa_iters, std::uint64_t seed) {
  Scored s;
  if (task == Task::Regression) {
    s.value = rmse(pred.col(0), gbt::target_vector(valid.target()));
    return s;
  }
  const auto truth = codes_of(valid);
  if (!consumes_labels(measure)) {
    s.value = logloss(pred, truth);
    return s;
  }
  const auto label_measure = threshold::mmce_measure();
  threshold::Optimized opt;
  if (task == Task::Binary) {
    std::vector<double> positive(pred.col(1).data(), pred.col(1).data() + pred.rows());
    opt = threshold::optimize_binary(positive, truth, label_measure);
  } else {
    threshold::GsaOptions options;
    options.iters = gsa_iters;
    options.seed = seed;
    opt = threshold::optimize_multiclass_gsa(pred, truth, label_measure, options);
  }
  s.value = opt.value;
  s.thresholds = opt.thresholds;
  return s;
}

}  // namespace

PipelineModel autogbt_fit(const Dataset& d, const AutoConfig& cfg) {
  cfg.validate();
  const Target& target = d.target();
  const Measure measure = cfg.measure.value_or(default_measure(target.task));
  check_measure(measure, target.task);

  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + std::chrono::duration_cast<clock::duration>(
                                           std::chrono::duration<double>(cfg.deadline));

  SplitPair split = split_holdout(d, cfg.valid_fraction, cfg.seed, is_classification(target.task));
  encoding::EncoderModel encoders = encoding::fit_encoders(split.train, cfg.k, cfg.high_card, cfg.smoothing);
  const Dataset train = encoding::transform(encoders, split.train);
  const Dataset valid = encoding::transform(encoders, split.valid);
  const Eigen::MatrixXd X_train = feature_matrix(train);
  const Eigen::MatrixXd X_valid = feature_matrix(valid);
  const Eigen::VectorXd y_train = gbt::target_vector(train.target());
  const Eigen::VectorXd y_valid = gbt::target_vector(valid.target());

  gbt::GBTConfig controls;
  controls.max_rounds = cfg.max_rounds;
  controls.patience = cfg.patience;
  controls.seed = cfg.seed;

  const smbo::ParamSpace space = smbo::ParamSpace::simple();
  struct Incumbent {
    double value = std::numeric_limits<double>::infinity();
    gbt::BoostedModel model;
    gbt::GBTConfig config;
    std::optional<threshold::ThresholdVector> thresholds;
    bool set = false;
  } incumbent;

  auto objective = [&](const Eigen::VectorXd& point) {
    const gbt::GBTConfig gcfg = smbo::decode_config(point, space, controls);
    gbt::TrainControls tc;
    tc.deadline = deadline;
    auto result = gbt::train(X_train, y_train, X_valid, y_valid, target.task, target.n_classes(), gcfg,
                             measure, tc);
    const Eigen::MatrixXd pred = gbt::predict(result.model, X_valid);
    Scored s = score_predictions(target.task, measure, pred, valid, cfg.gsa_iters, cfg.seed);
    if (!incumbent.set || s.value < incumbent.value) {
      incumbent.value = s.value;
      incumbent.model = std::move(result.model);
      incumbent.config = gcfg;
      incumbent.thresholds = s.thresholds;
      incumbent.set = true;
    }
    return s.value;
  };

  const int n_init = std::min(cfg.n_init, cfg.budget);
  smbo::TuneState state = smbo::tune(objective, space, cfg.budget, cfg.deadline, n_init, cfg.seed);
  if (!incumbent.set) throw std::runtime_error("autogbt_fit: no evaluation completed");

  PipelineModel p;
  p.schema = FeatureSchema::of(d);
  p.target_name = target.name;
  p.task = target.task;
  p.classes = target.classes;
  p.measure = measure;
  p.encoders = std::move(encoders);
  p.model = std::move(incumbent.model);
  p.thresholds = incumbent.thresholds;
  p.config = incumbent.config;
  p.validation_value = incumbent.value;
  p.split_seed = split.seed;
  p.validation_rows = split.valid_rows;
  for (const auto& spec : space.params) p.param_names.push_back(spec.name);
  p.history = std::move(state.evaluated);
  return p;
}

namespace {

Dataset align_features(const PipelineModel& p, const Dataset& newdata) {
  std::vector<Column> columns;
  columns.reserve(p.schema.names.size());
  for (std::size_t j = 0; j < p.schema.names.size(); ++j) {
    const Column* found = nullptr;
    for (const auto& c : newdata.features()) {
      if (c.name == p.schema.names[j]) found = &c;
    }
    if (!found) throw DataError("predict: missing feature '" + p.schema.names[j] + "'");
    if (found->kind != p.schema.kinds[j]) {
      throw DataError("predict: feature '" + p.schema.names[j] + "' has the wrong kind");
    }
    columns.push_back(*found);
  }
  return Dataset::features_only(std::move(columns));
}

}  // namespace

Predictions autogbt_predict(const PipelineModel& p, const Dataset& newdata) {
  const Dataset aligned = align_features(p, newdata);
  const Dataset encoded = encoding::transform(p.encoders, aligned);
  const Eigen::MatrixXd pred = gbt::predict(p.model, feature_matrix(encoded));

  Predictions out;
  if (p.task == Task::Regression) {
    out.values = pred.col(0);
    return out;
  }
  out.probabilities = pred;
  out.codes = p.thresholds ? threshold::apply_thresholds(pred, *p.thresholds) : default_labels(pred);
  out.labels.reserve(out.codes.size());
  for (int c : out.codes) out.labels.push_back(p.classes[static_cast<std::size_t>(c)]);
  return out;
}

double validation_score(const PipelineModel& p, const Dataset& valid) {
  const Eigen::MatrixXd pred = gbt::predict(p.model, feature_matrix(valid));
  if (p.task == Task::Regression) return rmse(pred.col(0), gbt::target_vector(valid.target()));
  if (!consumes_labels(p.measure)) return logloss(pred, valid.target().codes);
  const auto labels = p.thresholds ? threshold::apply_thresholds(pred, *p.thresholds) : default_labels(pred);
  return mmce(labels, valid.target().codes);
}

}  // namespace autoboost
