#ifndef AUTOBOOST_THRESHOLD_HPP
#define AUTOBOOST_THRESHOLD_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace autoboost::threshold {

/// Binary: one cutoff on the positive-class probability. Multiclass: one
/// positive divisor per class, normalized to sum 1.
struct ThresholdVector {
  Eigen::VectorXd values;

  static ThresholdVector binary(double t);
  static ThresholdVector uniform(int n_classes);
  bool is_binary() const { return values.size() == 1; }
};

/// Scores hard labels against the truth; lower is better.
using LabelMeasure = std::function<double(std::span<const int> predicted, std::span<const int> truth)>;

LabelMeasure mmce_measure();

/// Binary: positive iff p(positive) >= t (prob has 1 or 2 columns; the last
/// is the positive class). Multiclass: argmax of p_k / t_k, lowest index on ties.
std::vector<int> apply_thresholds(const Eigen::Ref<const Eigen::MatrixXd>& prob, const ThresholdVector& t);

struct Optimized {
  ThresholdVector thresholds;
  double value = 0.0;
};

/// Multi-start linesearch over a grid of `n_steps` cutoffs in (0, 1), each
/// start walking downhill (across plateaus) in both directions, followed by
/// a 10x finer search around every local best. t = 0.5 is always evaluated
/// first, so the result is never worse than it.
Optimized optimize_binary(std::span<const double> prob, std::span<const int> truth,
                          const LabelMeasure& measure, int n_starts = 5, int n_steps = 100);

struct GsaOptions {
  int iters = 500;
  std::uint64_t seed = 1;
  double visit_shape = 2.62;  // q_v
  double temp0 = 1.0;
};

/// Generalized simulated annealing over the open simplex of per-class
/// divisors, started at uniform thresholds; returns the best state seen.
Optimized optimize_multiclass_gsa(const Eigen::Ref<const Eigen::MatrixXd>& prob, std::span<const int> truth,
                                  const LabelMeasure& measure, const GsaOptions& options = {});

/// Visiting temperature at iteration i (1-based).
double visiting_temperature(double temp0, double visit_shape, int i);

/// One draw from the Tsallis visiting distribution at temperature T.
double visiting_step(double T, double visit_shape, double normal_a, double normal_b);

}  // namespace autoboost::threshold

#endif  // AUTOBOOST_THRESHOLD_HPP
