#include "autoboost/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "autoboost/metrics.hpp"

namespace autoboost::threshold {

ThresholdVector ThresholdVector::binary(double t) {
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("binary threshold must lie in (0,1)");
  return {Eigen::VectorXd::Constant(1, t)};
}

ThresholdVector ThresholdVector::uniform(int n_classes) {
  if (n_classes < 3) throw std::invalid_argument("multiclass thresholds need >= 3 classes");
  return {Eigen::VectorXd::Constant(n_classes, 1.0 / n_classes)};
}

LabelMeasure mmce_measure() {
  return [](std::span<const int> predicted, std::span<const int> truth) { return mmce(predicted, truth); };
}

std::vector<int> apply_thresholds(const Eigen::Ref<const Eigen::MatrixXd>& prob, const ThresholdVector& t) {
  std::vector<int> out(static_cast<std::size_t>(prob.rows()));
  if (t.is_binary()) {
    if (prob.cols() != 1 && prob.cols() != 2) throw std::invalid_argument("apply_thresholds: K mismatch");
    const Eigen::Index pos = prob.cols() - 1;
    for (Eigen::Index i = 0; i < prob.rows(); ++i) {
      out[static_cast<std::size_t>(i)] = prob(i, pos) >= t.values(0);
    }
    return out;
  }
  if (prob.cols() != t.values.size()) throw std::invalid_argument("apply_thresholds: K mismatch");
  if ((t.values.array() <= 0.0).any()) throw std::invalid_argument("apply_thresholds: divisors must be positive");
  for (Eigen::Index i = 0; i < prob.rows(); ++i) {
    Eigen::Index best = 0;
    double best_ratio = prob(i, 0) / t.values(0);
    for (Eigen::Index k = 1; k < prob.cols(); ++k) {
      const double r = prob(i, k) / t.values(k);
      if (r > best_ratio) {
        best_ratio = r;
        best = k;
      }
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

Optimized optimize_binary(std::span<const double> prob, std::span<const int> truth,
                          const LabelMeasure& measure, int n_starts, int n_steps) {
  if (prob.size() != truth.size() || prob.empty()) {
    throw std::invalid_argument("optimize_binary: need equal, non-empty inputs");
  }
  if (n_starts < 1 || n_steps < 1) throw std::invalid_argument("optimize_binary: bad grid settings");
  for (std::size_t i = 0; i < prob.size(); ++i) {
    if (!(prob[i] >= 0.0 && prob[i] <= 1.0) || (truth[i] != 0 && truth[i] != 1)) {
      throw std::invalid_argument("optimize_binary: input is not binary");
    }
  }

  std::vector<int> labels(prob.size());
  auto score = [&](double t) {
    for (std::size_t i = 0; i < prob.size(); ++i) labels[i] = prob[i] >= t;
    return measure(labels, truth);
  };

  double best_t = 0.5;
  double best_value = score(0.5);
  auto offer = [&](double t, double v) {
    if (v < best_value) {
      best_value = v;
      best_t = t;
    }
  };

  const double h = 1.0 / (n_steps + 1);
  auto grid = [&](int j) { return (j + 1) * h; };  // j in [0, n_steps)
  std::vector<double> cache(static_cast<std::size_t>(n_steps), std::numeric_limits<double>::quiet_NaN());
  auto at = [&](int j) {
    auto& c = cache[static_cast<std::size_t>(j)];
    if (std::isnan(c)) c = score(grid(j));
    return c;
  };

  std::vector<int> local_best;
  for (int s = 0; s < n_starts; ++s) {
    const double start = (s + 0.5) / n_starts;
    const int j0 = std::clamp(static_cast<int>(std::lround(start / h)) - 1, 0, n_steps - 1);
    int best_j = j0;
    for (int dir : {-1, 1}) {
      int j = j0;
      double current = at(j);
      while (j + dir >= 0 && j + dir < n_steps && at(j + dir) <= current) {
        j += dir;
        current = at(j);
        if (current < at(best_j)) best_j = j;
      }
    }
    local_best.push_back(best_j);
  }

  for (int j : local_best) {
    offer(grid(j), at(j));
    const double fine = h / 10.0;
    for (int k = -9; k <= 9; ++k) {
      const double t = grid(j) + k * fine;
      if (k == 0 || t <= 0.0 || t >= 1.0) continue;
      offer(t, score(t));
    }
  }
  return {ThresholdVector::binary(best_t), best_value};
}

double visiting_temperature(double temp0, double visit_shape, int i) {
  const double q1 = visit_shape - 1.0;
  return temp0 * (std::pow(2.0, q1) - 1.0) / (std::pow(1.0 + i, q1) - 1.0);
}

double visiting_step(double T, double visit_shape, double normal_a, double normal_b) {
  // Tsallis-Stariolo visiting distribution, sampled as in the GSA literature.
  const double qv = visit_shape;
  const double f1 = std::exp(std::log(T) / (qv - 1.0));
  const double f2 = std::exp((4.0 - qv) * std::log(qv - 1.0));
  const double f3 = std::exp((2.0 - qv) * std::numbers::ln2 / (qv - 1.0));
  const double f4 = std::sqrt(std::numbers::pi) * f1 * f2 / (f3 * (3.0 - qv));
  const double f5 = 1.0 / (qv - 1.0) - 0.5;
  const double d1 = 2.0 - f5;
  const double f6 = std::numbers::pi * (1.0 - f5) / std::sin(std::numbers::pi * (1.0 - f5)) / std::exp(std::lgamma(d1));
  const double sigma = std::exp(-(qv - 1.0) * std::log(f6 / f4) / (3.0 - qv));
  const double den = std::exp((qv - 1.0) * std::log(std::abs(normal_b)) / (3.0 - qv));
  constexpr double kTailLimit = 1e8;
  return std::clamp(sigma * normal_a / den, -kTailLimit, kTailLimit);
}

Optimized optimize_multiclass_gsa(const Eigen::Ref<const Eigen::MatrixXd>& prob, std::span<const int> truth,
                                  const LabelMeasure& measure, const GsaOptions& options) {
  const auto K = static_cast<int>(prob.cols());
  if (K < 3) throw std::invalid_argument("optimize_multiclass_gsa: need >= 3 classes");
  if (options.iters < 1) throw std::invalid_argument("optimize_multiclass_gsa: iters must be >= 1");
  if (static_cast<std::size_t>(prob.rows()) != truth.size() || truth.empty()) {
    throw std::invalid_argument("optimize_multiclass_gsa: need equal, non-empty inputs");
  }

  constexpr double kFloor = 1e-6;
  auto score = [&](const Eigen::VectorXd& w) { return measure(apply_thresholds(prob, {w}), truth); };

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Eigen::VectorXd current = ThresholdVector::uniform(K).values;
  double current_value = score(current);
  Eigen::VectorXd best = current;
  double best_value = current_value;

  for (int i = 1; i <= options.iters; ++i) {
    const double t_visit = visiting_temperature(options.temp0, options.visit_shape, i);
    const double t_accept = t_visit / (i + 1);
    Eigen::VectorXd candidate(K);
    for (int k = 0; k < K; ++k) {
      const double a = normal(rng);
      const double b = normal(rng);
      double v = current(k) + visiting_step(t_visit, options.visit_shape, a, b);
      v = std::fmod(v, 1.0);  // wrap into the unit interval
      if (v < 0.0) v += 1.0;
      candidate(k) = std::max(v, kFloor);
    }
    candidate /= candidate.sum();

    const double value = score(candidate);
    const double delta = value - current_value;
    if (delta <= 0.0 || unit(rng) < std::exp(-delta / t_accept)) {
      current = candidate;
      current_value = value;
    }
    if (value < best_value) {
      best_value = value;
      best = candidate;
    }
  }
  return {{best}, best_value};
}

}  // namespace autoboost::threshold
