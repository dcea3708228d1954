#ifndef AUTOBOOST_METRICS_HPP
#define AUTOBOOST_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "autoboost/data.hpp"

namespace autoboost {

/// Performance measures. All are minimized.
enum class Measure { Mmce, Logloss, Rmse };

std::string to_string(Measure m);
Measure parse_measure(const std::string& name);
Measure default_measure(Task task);

/// True when the measure scores hard labels (and so benefits from thresholds).
inline bool consumes_labels(Measure m) { return m == Measure::Mmce; }

/// Throws std::invalid_argument when the measure cannot score the task.
void check_measure(Measure m, Task task);

/// Fraction of positions where predicted != truth.
template <typename Range>
double mmce(const Range& predicted, const Range& truth) {
  const auto n = static_cast<std::size_t>(std::size(truth));
  if (static_cast<std::size_t>(std::size(predicted)) != n) {
    throw std::invalid_argument("mmce: length mismatch");
  }
  if (n == 0) throw std::invalid_argument("mmce: empty input");
  std::size_t wrong = 0;
  auto p = std::begin(predicted);
  for (auto t = std::begin(truth); t != std::end(truth); ++t, ++p) wrong += !(*p == *t);
  return static_cast<double>(wrong) / static_cast<double>(n);
}

inline constexpr double kLoglossEps = 1e-15;

/// Mean negative log probability of the true class, probabilities clipped
/// to [1e-15, 1 - 1e-15].
template <typename Derived>
double logloss(const Eigen::MatrixBase<Derived>& prob, std::span<const int> truth) {
  if (prob.rows() != static_cast<Eigen::Index>(truth.size())) {
    throw std::invalid_argument("logloss: length mismatch");
  }
  if (truth.empty()) throw std::invalid_argument("logloss: empty input");
  double total = 0.0;
  for (Eigen::Index i = 0; i < prob.rows(); ++i) {
    if (std::abs(prob.row(i).sum() - 1.0) > 1e-8) {
      throw std::invalid_argument("logloss: row " + std::to_string(i) + " is not stochastic");
    }
    const int y = truth[static_cast<std::size_t>(i)];
    if (y < 0 || y >= prob.cols()) throw std::invalid_argument("logloss: unknown label");
    const double p = std::clamp(static_cast<double>(prob(i, y)), kLoglossEps, 1.0 - kLoglossEps);
    total -= std::log(p);
  }
  return total / static_cast<double>(prob.rows());
}

template <typename DerivedA, typename DerivedB>
double rmse(const Eigen::MatrixBase<DerivedA>& predicted, const Eigen::MatrixBase<DerivedB>& truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("rmse: length mismatch");
  if (truth.size() == 0) throw std::invalid_argument("rmse: empty input");
  return std::sqrt((predicted - truth).squaredNorm() / static_cast<double>(truth.size()));
}

/// Hard labels from class probabilities: argmax (first maximum wins).
std::vector<int> argmax_labels(const Eigen::Ref<const Eigen::MatrixXd>& prob);

/// Labels under default thresholds: p(positive) >= 0.5 for two columns,
/// argmax otherwise.
std::vector<int> default_labels(const Eigen::Ref<const Eigen::MatrixXd>& prob);

}  // namespace autoboost

#endif  // AUTOBOOST_METRICS_HPP
