#include "autoboost/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace autoboost::gbt {

void GBTConfig::validate() const {
  auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (!in_unit(colsample_bytree)) throw std::invalid_argument("colsample_bytree must be in (0,1]");
  if (!in_unit(colsample_bylevel)) throw std::invalid_argument("colsample_bylevel must be in (0,1]");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  if (!in_unit(subsample)) throw std::invalid_argument("subsample must be in (0,1]");
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (!(min_child_weight >= 0.0)) throw std::invalid_argument("min_child_weight must be >= 0");
}

double logistic_loss(double f, double y) {
  // log(1 + e^f) - y f, evaluated without overflow
  const double softplus = f > 0.0 ? f + std::log1p(std::exp(-f)) : std::log1p(std::exp(f));
  return softplus - y * f;
}

GradHess logistic_grad_hess(double f, double y) {
  const double p = sigmoid(f);
  return {p - y, p * (1.0 - p)};
}

double softmax_loss(const Eigen::Ref<const Eigen::VectorXd>& logits, int y) {
  const double shift = logits.maxCoeff();
  const double lse = shift + std::log((logits.array() - shift).exp().sum());
  return lse - logits(y);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> softmax_grad_hess(
    const Eigen::Ref<const Eigen::VectorXd>& logits, int y) {
  Eigen::VectorXd p = softmax(logits);
  Eigen::VectorXd g = p;
  g(y) -= 1.0;
  Eigen::VectorXd h = (p.array() * (1.0 - p.array())).matrix();
  return {g, h};
}

double split_gain(double grad_left, double hess_left, double grad_right, double hess_right,
                  double lambda, double gamma, double alpha) {
  auto score = [&](double g, double h) {
    const double s = soft_threshold(g, alpha);
    return s * s / (h + lambda);
  };
  return 0.5 * (score(grad_left, hess_left) + score(grad_right, hess_right) -
                score(grad_left + grad_right, hess_left + hess_right)) -
         gamma;
}

double leaf_weight(double grad, double hess, double lambda, double alpha) {
  const double denom = hess + lambda;
  if (denom <= 0.0) return 0.0;
  return -soft_threshold(grad, alpha) / denom;
}

int Tree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> level(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    if (n.is_leaf()) continue;
    level[static_cast<std::size_t>(n.left)] = level[i] + 1;
    level[static_cast<std::size_t>(n.right)] = level[i] + 1;
    deepest = std::max(deepest, level[i] + 1);
  }
  return deepest;
}

// ---------------------------------------------------------------------------

TreeBuilder::TreeBuilder(const Eigen::MatrixXd& X) : X_(X), sorted_(static_cast<std::size_t>(X.cols())) {
  for (Eigen::Index f = 0; f < X.cols(); ++f) {
    auto& idx = sorted_[static_cast<std::size_t>(f)];
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      if (!std::isnan(X(r, f))) idx.push_back(static_cast<std::size_t>(r));
    }
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return X(static_cast<Eigen::Index>(a), f) < X(static_cast<Eigen::Index>(b), f); });
  }
}

namespace {

struct Stat {
  double grad = 0.0;
  double hess = 0.0;
  std::size_t count = 0;

  void add(double g, double h) {
    grad += g;
    hess += h;
    ++count;
  }
  Stat operator+(const Stat& o) const { return {grad + o.grad, hess + o.hess, count + o.count}; }
  Stat operator-(const Stat& o) const { return {grad - o.grad, hess - o.hess, count - o.count}; }
};

struct Candidate {
  double gain = 0.0;  // only strictly positive gains are accepted
  int feature = -1;
  double threshold = 0.0;
  bool default_left = true;
};

// Gains within a relative 1e-12 of the incumbent count as ties and keep the
// earlier candidate, so the choice does not depend on summation order.
bool better_gain(double gain, const Candidate& best) {
  if (best.feature < 0) return gain > 0.0;
  return gain > best.gain + 1e-12 * std::abs(best.gain);
}

std::vector<int> sample_features(std::span<const int> pool, double fraction, std::mt19937_64& rng) {
  std::vector<int> out(pool.begin(), pool.end());
  if (fraction >= 1.0 || out.size() <= 1) return out;
  const auto keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(out.size()))));
  std::shuffle(out.begin(), out.end(), rng);
  out.resize(keep);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Tree TreeBuilder::build(std::span<const double> grad, std::span<const double> hess,
                        std::span<const std::size_t> rows, std::span<const int> features,
                        const TreeParams& params, std::mt19937_64& rng) const {
  const std::size_t n = static_cast<std::size_t>(X_.rows());
  Tree tree;
  tree.nodes.emplace_back();

  std::vector<int> position(n, -1);
  std::vector<Stat> stats(1);
  for (auto r : rows) {
    position[r] = 0;
    stats[0].add(grad[r], hess[r]);
  }

  std::vector<int> frontier{0};
  for (int depth = 0; depth < params.max_depth && !frontier.empty(); ++depth) {
    const auto level_features = sample_features(features, params.colsample_bylevel, rng);

    std::vector<int> slot(tree.nodes.size(), -1);
    for (std::size_t s = 0; s < frontier.size(); ++s) slot[static_cast<std::size_t>(frontier[s])] = static_cast<int>(s);
    std::vector<Candidate> best(frontier.size());

    std::vector<Stat> nonmissing(frontier.size());
    std::vector<Stat> running(frontier.size());
    std::vector<double> last(frontier.size());

    for (int f : level_features) {
      const auto& order = sorted_[static_cast<std::size_t>(f)];
      std::fill(nonmissing.begin(), nonmissing.end(), Stat{});
      std::fill(running.begin(), running.end(), Stat{});
      for (auto r : order) {
        const int node = position[r];
        if (node < 0 || slot[static_cast<std::size_t>(node)] < 0) continue;
        nonmissing[static_cast<std::size_t>(slot[static_cast<std::size_t>(node)])].add(grad[r], hess[r]);
      }

      auto consider = [&](std::size_t s, const Stat& left, const Stat& right, double threshold,
                          bool default_left) {
        if (left.hess < params.min_child_weight || right.hess < params.min_child_weight) return;
        const double gain = split_gain(left.grad, left.hess, right.grad, right.hess, params.lambda,
                                       params.gamma, params.alpha);
        if (better_gain(gain, best[s])) best[s] = {gain, f, threshold, default_left};
      };

      for (auto r : order) {
        const int node = position[r];
        if (node < 0) continue;
        const int si = slot[static_cast<std::size_t>(node)];
        if (si < 0) continue;
        const auto s = static_cast<std::size_t>(si);
        const double v = X_(static_cast<Eigen::Index>(r), f);
        if (running[s].count > 0 && v > last[s]) {
          double threshold = last[s] + (v - last[s]) / 2.0;
          if (!(threshold > last[s])) threshold = v;
          const Stat missing = stats[static_cast<std::size_t>(node)] - nonmissing[s];
          const Stat right_nonmissing = nonmissing[s] - running[s];
          consider(s, running[s] + missing, right_nonmissing, threshold, true);
          if (missing.count > 0) consider(s, running[s], right_nonmissing + missing, threshold, false);
        }
        running[s].add(grad[r], hess[r]);
        last[s] = v;
      }
    }

    std::vector<int> next;
    bool any_split = false;
    for (std::size_t s = 0; s < frontier.size(); ++s) {
      if (best[s].feature < 0) continue;
      any_split = true;
      const int id = frontier[s];
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      Node& node = tree.nodes[static_cast<std::size_t>(id)];
      node.feature = best[s].feature;
      node.threshold = best[s].threshold;
      node.default_left = best[s].default_left;
      node.gain = best[s].gain;
      node.left = left;
      node.right = left + 1;
      next.push_back(left);
      next.push_back(left + 1);
    }
    if (!any_split) break;

    stats.resize(tree.nodes.size());
    for (int id : next) stats[static_cast<std::size_t>(id)] = Stat{};
    for (auto r : rows) {
      const Node& node = tree.nodes[static_cast<std::size_t>(position[r])];
      if (node.is_leaf()) continue;
      const double v = X_(static_cast<Eigen::Index>(r), node.feature);
      const bool go_left = std::isnan(v) ? node.default_left : v < node.threshold;
      position[r] = go_left ? node.left : node.right;
      stats[static_cast<std::size_t>(position[r])].add(grad[r], hess[r]);
    }
    frontier = std::move(next);
  }

  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    Node& node = tree.nodes[id];
    if (!node.is_leaf()) continue;
    node.value = params.eta * leaf_weight(stats[id].grad, stats[id].hess, params.lambda, params.alpha);
  }
  return tree;
}

// ---------------------------------------------------------------------------

int best_iteration(std::span<const double> history) {
  if (history.empty()) return 0;
  return static_cast<int>(std::min_element(history.begin(), history.end()) - history.begin()) + 1;
}

namespace {

Eigen::VectorXd initial_score(Task task, int n_classes, const Eigen::VectorXd& y) {
  constexpr double kFloor = 1e-6;
  if (task == Task::Regression) return Eigen::VectorXd::Constant(1, y.mean());
  if (task == Task::Binary) {
    const double p = std::clamp((y.array() == 1.0).cast<double>().mean(), kFloor, 1.0 - kFloor);
    return Eigen::VectorXd::Constant(1, std::log(p / (1.0 - p)));
  }
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(n_classes);
  for (Eigen::Index i = 0; i < y.size(); ++i) freq(static_cast<Eigen::Index>(y(i))) += 1.0;
  freq /= static_cast<double>(y.size());
  return freq.array().max(kFloor).log().matrix();
}

void fill_gradients(Task task, const Eigen::MatrixXd& raw, const Eigen::VectorXd& y,
                    Eigen::MatrixXd& grad, Eigen::MatrixXd& hess) {
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    if (task == Task::Regression) {
      auto gh = squared_grad_hess(raw(i, 0), y(i));
      grad(i, 0) = gh.grad;
      hess(i, 0) = gh.hess;
    } else if (task == Task::Binary) {
      auto gh = logistic_grad_hess(raw(i, 0), y(i));
      grad(i, 0) = gh.grad;
      hess(i, 0) = gh.hess;
    } else {
      auto [g, h] = softmax_grad_hess(raw.row(i).transpose(), static_cast<int>(y(i)));
      grad.row(i) = g.transpose();
      hess.row(i) = h.transpose();
    }
  }
}

std::vector<int> to_codes(const Eigen::VectorXd& y) {
  std::vector<int> out(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<int>(y(i));
  return out;
}

}  // namespace

Eigen::MatrixXd link(const BoostedModel& model, const Eigen::MatrixXd& raw) {
  if (model.task == Task::Regression) return raw;
  Eigen::MatrixXd out(raw.rows(), model.task == Task::Binary ? 2 : raw.cols());
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    if (model.task == Task::Binary) {
      const double p = sigmoid(raw(i, 0));
      out(i, 0) = 1.0 - p;
      out(i, 1) = p;
    } else {
      out.row(i) = softmax(raw.row(i).transpose()).transpose();
    }
  }
  return out;
}

double evaluate(Task task, Measure measure, const Eigen::MatrixXd& pred, const Eigen::VectorXd& y) {
  check_measure(measure, task);
  switch (measure) {
    case Measure::Rmse: return rmse(pred.col(0), y);
    case Measure::Logloss: {
      const auto codes = to_codes(y);
      return logloss(pred, codes);
    }
    case Measure::Mmce: {
      const auto codes = to_codes(y);
      return mmce(default_labels(pred), codes);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

TrainResult train(const Eigen::MatrixXd& X_train, const Eigen::VectorXd& y_train,
                  const Eigen::MatrixXd& X_valid, const Eigen::VectorXd& y_valid, Task task,
                  int n_classes, const GBTConfig& cfg, Measure measure,
                  const TrainControls& controls) {
  cfg.validate();
  check_measure(measure, task);
  if (X_train.rows() == 0) throw DataError("train: empty training set");
  if (X_valid.rows() == 0) throw DataError("train: empty validation set");
  if (X_train.rows() != y_train.size() || X_valid.rows() != y_valid.size()) {
    throw DataError("train: feature/target length mismatch");
  }
  if (X_train.cols() != X_valid.cols()) throw DataError("train: train/valid feature count differs");
  if (task == Task::Binary) n_classes = 2;
  if (task == Task::Multiclass && n_classes < 3) throw DataError("train: multiclass needs >= 3 classes");

  const Eigen::Index n = X_train.rows();
  const int n_features = static_cast<int>(X_train.cols());

  TrainResult result;
  BoostedModel& model = result.model;
  model.task = task;
  model.n_classes = task == Task::Regression ? 1 : n_classes;
  model.n_outputs = task == Task::Multiclass ? n_classes : 1;
  model.n_features = n_features;
  model.base_score = initial_score(task, n_classes, y_train);

  const int K = model.n_outputs;
  Eigen::MatrixXd raw_train = model.base_score.transpose().replicate(n, 1);
  Eigen::MatrixXd raw_valid = model.base_score.transpose().replicate(X_valid.rows(), 1);
  Eigen::MatrixXd grad(n, K), hess(n, K);

  TreeBuilder builder(X_train);
  std::mt19937_64 rng(cfg.seed);
  std::vector<int> all_features(static_cast<std::size_t>(n_features));
  std::iota(all_features.begin(), all_features.end(), 0);
  std::vector<std::size_t> all_rows(static_cast<std::size_t>(n));
  std::iota(all_rows.begin(), all_rows.end(), 0);

  TreeParams params;
  params.max_depth = cfg.max_depth;
  params.lambda = cfg.lambda;
  params.alpha = cfg.alpha;
  params.gamma = cfg.gamma;
  params.eta = cfg.eta;
  params.min_child_weight = cfg.min_child_weight;
  params.colsample_bylevel = cfg.colsample_bylevel;

  double best_value = std::numeric_limits<double>::infinity();
  int best_round = 0;
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    if (round > 1 && controls.deadline && std::chrono::steady_clock::now() >= *controls.deadline) {
      result.truncated = true;
      break;
    }
    fill_gradients(task, raw_train, y_train, grad, hess);

    std::vector<std::size_t> rows = all_rows;
    if (cfg.subsample < 1.0) {
      const auto keep = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(cfg.subsample * static_cast<double>(n))));
      std::shuffle(rows.begin(), rows.end(), rng);
      rows.resize(keep);
      std::sort(rows.begin(), rows.end());
    }

    for (int c = 0; c < K; ++c) {
      const auto tree_features = sample_features(all_features, cfg.colsample_bytree, rng);
      Tree tree = builder.build(std::span<const double>(grad.col(c).data(), static_cast<std::size_t>(n)),
                                std::span<const double>(hess.col(c).data(), static_cast<std::size_t>(n)),
                                rows, tree_features, params, rng);
      for (Eigen::Index i = 0; i < n; ++i) raw_train(i, c) += tree.predict_row(X_train.row(i));
      for (Eigen::Index i = 0; i < X_valid.rows(); ++i) raw_valid(i, c) += tree.predict_row(X_valid.row(i));
      model.trees.push_back(std::move(tree));
    }

    const double value = evaluate(task, measure, link(model, raw_valid), y_valid);
    model.valid_history.push_back(value);
    if (value < best_value) {
      best_value = value;
      best_round = round;
    }
    if (round - best_round >= cfg.patience) break;
  }
  model.best_iteration = best_iteration(model.valid_history);
  return result;
}

Eigen::VectorXd target_vector(const Target& t) {
  if (t.task == Task::Regression) {
    return Eigen::Map<const Eigen::VectorXd>(t.values.data(), static_cast<Eigen::Index>(t.values.size()));
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(t.codes.size()));
  for (std::size_t i = 0; i < t.codes.size(); ++i) y(static_cast<Eigen::Index>(i)) = t.codes[i];
  return y;
}

BoostedModel train(const Dataset& train_set, const Dataset& valid_set, const GBTConfig& cfg,
                   Measure measure) {
  const Target& t = train_set.target();
  if (valid_set.target().task != t.task) throw DataError("train: train/valid task differs");
  if (FeatureSchema::of(train_set) != FeatureSchema::of(valid_set)) {
    throw DataError("train: train/valid schema differs");
  }
  return train(feature_matrix(train_set), target_vector(t), feature_matrix(valid_set),
               target_vector(valid_set.target()), t.task, t.n_classes(), cfg, measure)
      .model;
}

Eigen::MatrixXd predict_raw(const BoostedModel& model, const Eigen::MatrixXd& X,
                            std::optional<int> rounds) {
  if (X.cols() != model.n_features) {
    throw DataError("predict: expected " + std::to_string(model.n_features) + " features, got " +
                    std::to_string(X.cols()));
  }
  const int use = std::clamp(rounds.value_or(model.best_iteration), 0, model.rounds());
  Eigen::MatrixXd raw = model.base_score.transpose().replicate(X.rows(), 1);
  for (int r = 0; r < use; ++r) {
    for (int c = 0; c < model.n_outputs; ++c) {
      const Tree& tree = model.trees[static_cast<std::size_t>(r * model.n_outputs + c)];
      for (Eigen::Index i = 0; i < X.rows(); ++i) raw(i, c) += tree.predict_row(X.row(i));
    }
  }
  return raw;
}

Eigen::MatrixXd predict(const BoostedModel& model, const Eigen::MatrixXd& X, std::optional<int> rounds) {
  return link(model, predict_raw(model, X, rounds));
}

}  // namespace autoboost::gbt
