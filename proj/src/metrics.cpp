#include "autoboost/metrics.hpp"

namespace autoboost {

std::string to_string(Measure m) {
  switch (m) {
    case Measure::Mmce: return "mmce";
    case Measure::Logloss: return "logloss";
    case Measure::Rmse: return "rmse";
  }
  return "unknown";
}

Measure parse_measure(const std::string& name) {
  if (name == "mmce") return Measure::Mmce;
  if (name == "logloss") return Measure::Logloss;
  if (name == "rmse") return Measure::Rmse;
  throw std::invalid_argument("unknown measure: " + name);
}

Measure default_measure(Task task) {
  return is_classification(task) ? Measure::Mmce : Measure::Rmse;
}

void check_measure(Measure m, Task task) {
  const bool ok = is_classification(task) ? m != Measure::Rmse : m == Measure::Rmse;
  if (!ok) {
    throw std::invalid_argument("measure " + to_string(m) + " cannot score a " + to_string(task) +
                                " task");
  }
}

std::vector<int> argmax_labels(const Eigen::Ref<const Eigen::MatrixXd>& prob) {
  std::vector<int> out(static_cast<std::size_t>(prob.rows()));
  for (Eigen::Index i = 0; i < prob.rows(); ++i) {
    Eigen::Index best = 0;
    prob.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

std::vector<int> default_labels(const Eigen::Ref<const Eigen::MatrixXd>& prob) {
  if (prob.cols() != 2) return argmax_labels(prob);
  std::vector<int> out(static_cast<std::size_t>(prob.rows()));
  for (Eigen::Index i = 0; i < prob.rows(); ++i) out[static_cast<std::size_t>(i)] = prob(i, 1) >= 0.5;
  return out;
}

}  // namespace autoboost
