#ifndef AUTOBOOST_GBT_HPP
#define AUTOBOOST_GBT_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "autoboost/data.hpp"
#include "autoboost/metrics.hpp"

namespace autoboost::gbt {

/// Tuned hyperparameters (already on their natural scale) plus fixed
/// training controls.
struct GBTConfig {
  double eta = 0.1;
  double gamma = 0.0;
  int max_depth = 6;
  double colsample_bytree = 1.0;
  double colsample_bylevel = 1.0;
  double lambda = 1.0;
  double alpha = 0.0;
  double subsample = 1.0;

  int max_rounds = 1000;
  int patience = 10;
  double min_child_weight = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Losses. Scores are margins (logistic) or logits (softmax).

struct GradHess {
  double grad;
  double hess;
};

inline double sigmoid(double f) { return 1.0 / (1.0 + std::exp(-f)); }

inline double squared_loss(double f, double y) { return 0.5 * (f - y) * (f - y); }
inline GradHess squared_grad_hess(double f, double y) { return {f - y, 1.0}; }

/// Binary cross-entropy on a margin, y in {0, 1}.
double logistic_loss(double f, double y);
GradHess logistic_grad_hess(double f, double y);

/// Softmax probabilities with the max-logit shift.
template <typename Derived>
Eigen::VectorXd softmax(const Eigen::MatrixBase<Derived>& logits) {
  Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp().matrix();
  return p / p.sum();
}

double softmax_loss(const Eigen::Ref<const Eigen::VectorXd>& logits, int y);

/// Per-class gradient and diagonal hessian of the softmax cross-entropy.
std::pair<Eigen::VectorXd, Eigen::VectorXd> softmax_grad_hess(
    const Eigen::Ref<const Eigen::VectorXd>& logits, int y);

// ---------------------------------------------------------------------------
// Split scoring.

inline double soft_threshold(double g, double alpha) {
  const double mag = std::abs(g) - alpha;
  return mag > 0.0 ? (g > 0.0 ? mag : -mag) : 0.0;
}

/// Regularized gain of splitting a node into (L, R). With alpha > 0 the
/// gradient sums are soft-thresholded first.
double split_gain(double grad_left, double hess_left, double grad_right, double hess_right,
                  double lambda, double gamma, double alpha = 0.0);

/// Unshrunk optimal leaf weight -soft(G, alpha) / (H + lambda).
double leaf_weight(double grad, double hess, double lambda, double alpha);

// ---------------------------------------------------------------------------
// Trees.

struct Node {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  bool default_left = true;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output, already scaled by eta
  double gain = 0.0;   // split gain, for internal nodes

  bool is_leaf() const { return feature < 0; }
};

/// Binary regression tree. Rows with x < threshold go left, missing values
/// follow the node's default direction.
struct Tree {
  std::vector<Node> nodes;

  template <typename RowDerived>
  double predict_row(const Eigen::DenseBase<RowDerived>& x) const {
    int id = 0;
    while (!nodes[static_cast<std::size_t>(id)].is_leaf()) {
      const Node& node = nodes[static_cast<std::size_t>(id)];
      const double v = x(node.feature);
      if (std::isnan(v)) {
        id = node.default_left ? node.left : node.right;
      } else {
        id = v < node.threshold ? node.left : node.right;
      }
    }
    return nodes[static_cast<std::size_t>(id)].value;
  }

  int depth() const;
};

struct TreeParams {
  int max_depth = 6;
  double lambda = 1.0;
  double alpha = 0.0;
  double gamma = 0.0;
  double eta = 1.0;
  double min_child_weight = 0.0;
  double colsample_bylevel = 1.0;
};

/// Exact greedy tree growth over presorted features. `rows` are the sampled
/// rows, `features` the columns available to this tree (ascending).
class TreeBuilder {
 public:
  explicit TreeBuilder(const Eigen::MatrixXd& X);

  Tree build(std::span<const double> grad, std::span<const double> hess,
             std::span<const std::size_t> rows, std::span<const int> features,
             const TreeParams& params, std::mt19937_64& rng) const;

 private:
  const Eigen::MatrixXd& X_;
  std::vector<std::vector<std::size_t>> sorted_;  // non-missing rows by value, per feature
};

// ---------------------------------------------------------------------------
// Boosted model.

struct BoostedModel {
  Task task = Task::Regression;
  int n_classes = 1;    // class count for classification
  int n_outputs = 1;    // trees per round: K for multiclass, else 1
  int n_features = 0;
  Eigen::VectorXd base_score;
  std::vector<Tree> trees;  // round-major, n_outputs per round
  int best_iteration = 0;   // number of rounds used by default
  std::vector<double> valid_history;

  int rounds() const { return n_outputs == 0 ? 0 : static_cast<int>(trees.size()) / n_outputs; }
};

/// Earliest index (1-based) of the minimum of a history; 0 when empty.
int best_iteration(std::span<const double> history);

struct TrainControls {
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct TrainResult {
  BoostedModel model;
  bool truncated = false;  // stopped by the deadline
};

/// Boosting with early stopping on the validation set. y holds regression
/// values or class indices. `measure` is monitored on the validation set.
TrainResult train(const Eigen::MatrixXd& X_train, const Eigen::VectorXd& y_train,
                  const Eigen::MatrixXd& X_valid, const Eigen::VectorXd& y_valid, Task task,
                  int n_classes, const GBTConfig& cfg, Measure measure,
                  const TrainControls& controls = {});

/// Dataset overload; both datasets must be all-numeric with a target.
BoostedModel train(const Dataset& train_set, const Dataset& valid_set, const GBTConfig& cfg,
                   Measure measure);

/// Encodes a target as the numeric vector used by `train`.
Eigen::VectorXd target_vector(const Target& t);

/// Raw scores (margins/logits, or regression values), n x n_outputs, using
/// the first `rounds` rounds (default: best_iteration).
Eigen::MatrixXd predict_raw(const BoostedModel& model, const Eigen::MatrixXd& X,
                            std::optional<int> rounds = std::nullopt);

/// Regression: n x 1 values. Classification: n x K row-stochastic
/// probabilities (binary gives two columns).
Eigen::MatrixXd predict(const BoostedModel& model, const Eigen::MatrixXd& X,
                        std::optional<int> rounds = std::nullopt);

/// Maps raw scores to the prediction scale of `predict`.
Eigen::MatrixXd link(const BoostedModel& model, const Eigen::MatrixXd& raw);

/// Validation measure for predictions on the `predict` scale.
double evaluate(Task task, Measure measure, const Eigen::MatrixXd& pred, const Eigen::VectorXd& y);

}  // namespace autoboost::gbt

#endif  // AUTOBOOST_GBT_HPP
