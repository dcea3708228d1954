#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "autoboost/threshold.hpp"
#include "oracles.hpp"

using namespace autoboost::threshold;

namespace {

std::vector<int> argmax_rows(const Eigen::MatrixXd& p) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    Eigen::Index k;
    p.row(i).maxCoeff(&k);
    out.push_back(static_cast<int>(k));
  }
  return out;
}

double mmce(const std::vector<int>& a, const std::vector<int>& b) { return mmce_measure()(a, b); }

}  // namespace

TEST_CASE("apply_thresholds examples") {
  Eigen::MatrixXd p(1, 1);
  p << 0.6;
  CHECK(apply_thresholds(p, ThresholdVector::binary(0.5)) == std::vector<int>{1});
  CHECK(apply_thresholds(p, ThresholdVector::binary(0.7)) == std::vector<int>{0});
  Eigen::MatrixXd two(1, 2);
  two << 0.4, 0.6;
  CHECK(apply_thresholds(two, ThresholdVector::binary(0.6)) == std::vector<int>{1});

  Eigen::MatrixXd q(1, 3);
  q << 0.5, 0.3, 0.2;
  CHECK(apply_thresholds(q, {Eigen::Vector3d(0.5, 0.25, 0.25)}) == std::vector<int>{1});
  CHECK(apply_thresholds(q, ThresholdVector::uniform(3)) == std::vector<int>{0});

  Eigen::MatrixXd tie(1, 3);
  tie << 0.4, 0.4, 0.2;
  CHECK(apply_thresholds(tie, ThresholdVector::uniform(3)) == std::vector<int>{0});

  CHECK_THROWS_AS(apply_thresholds(q, ThresholdVector::uniform(4)), std::invalid_argument);
  CHECK_THROWS_AS(ThresholdVector::binary(1.0), std::invalid_argument);
  CHECK_THROWS_AS(ThresholdVector::binary(0.0), std::invalid_argument);
}

TEST_CASE("uniform thresholds equal argmax and scaling leaves labels unchanged") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int K = 3 + trial % 4;
    const auto s = oracle::random_scores(40, K, rng);
    CHECK(apply_thresholds(s.prob, ThresholdVector::uniform(K)) == argmax_rows(s.prob));
    Eigen::VectorXd t = Eigen::VectorXd::NullaryExpr(K, [&] { return scale(rng); });
    const auto base = apply_thresholds(s.prob, {t});
    CHECK(apply_thresholds(s.prob, {t * scale(rng)}) == base);
  }
}

TEST_CASE("binary linesearch separates a gapped sample") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> neg(0.05, 0.35), pos(0.55, 0.95);
  std::vector<double> p;
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) {
    const bool positive = i % 3 == 0;
    p.push_back(positive ? pos(rng) : neg(rng));
    y.push_back(positive ? 1 : 0);
  }
  // shift so the gap sits away from 0.5
  for (auto& v : p) v = 0.5 * v;
  const Optimized r = optimize_binary(p, y, mmce_measure());
  CHECK(r.value == 0.0);
  REQUIRE(r.thresholds.is_binary());
  Eigen::MatrixXd m = Eigen::Map<Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
  CHECK(mmce(apply_thresholds(m, r.thresholds), y) == 0.0);
}

TEST_CASE("all-positive truth is fitted with a threshold below every probability") {
  const std::vector<double> p{0.2, 0.3, 0.45, 0.1, 0.8};
  const std::vector<int> y(5, 1);
  const Optimized r = optimize_binary(p, y, mmce_measure());
  CHECK(r.value == 0.0);
  CHECK(r.thresholds.values(0) <= 0.1);
}

TEST_CASE("probabilities already optimal at one half keep that value") {
  const std::vector<double> p{0.1, 0.2, 0.8, 0.9};
  const std::vector<int> y{0, 0, 1, 1};
  const Optimized r = optimize_binary(p, y, mmce_measure());
  CHECK(r.value == 0.0);
  CHECK_THROWS_AS(optimize_binary(p, std::vector<int>{0, 2, 1, 1}, mmce_measure()), std::invalid_argument);
  CHECK_THROWS_AS(optimize_binary({}, {}, mmce_measure()), std::invalid_argument);
}

TEST_CASE("optimizers are never worse than the default thresholds") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto b = oracle::random_scores(30 + trial % 20, 2, rng);
    const Eigen::VectorXd pos = b.prob.col(1);
    const std::vector<double> p(pos.data(), pos.data() + pos.size());
    const double at_half = mmce(apply_thresholds(b.prob, ThresholdVector::binary(0.5)), b.truth);
    CHECK(optimize_binary(p, b.truth, mmce_measure()).value <= at_half);

    const auto m = oracle::random_scores(30 + trial % 20, 3, rng);
    const double uniform = mmce(argmax_rows(m.prob), m.truth);
    GsaOptions o;
    o.iters = 100;
    o.seed = static_cast<std::uint64_t>(trial);
    CHECK(optimize_multiclass_gsa(m.prob, m.truth, mmce_measure(), o).value <= uniform);
  }
}

TEST_CASE("GSA finds the under-scored class and matches the grid oracle") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto s = oracle::underscored_three_class(300, seed);
    const double argmax_value = mmce(argmax_rows(s.prob), s.truth);
    const Optimized r = optimize_multiclass_gsa(s.prob, s.truth, mmce_measure());
    const auto grid = oracle::simplex_grid_mmce(s.prob, s.truth, 50);
    CHECK(r.value < argmax_value);
    CHECK(r.value <= grid.value + grid.cell_tolerance);
    CHECK(r.thresholds.values.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((r.thresholds.values.array() > 0.0).all());
    // the reported value is the value of the returned thresholds
    CHECK(mmce(apply_thresholds(s.prob, r.thresholds), s.truth) == r.value);
  }
}

TEST_CASE("GSA keeps an optimal start and is deterministic per seed") {
  Eigen::MatrixXd p(3, 3);
  p << 0.8, 0.1, 0.1, 0.1, 0.8, 0.1, 0.1, 0.1, 0.8;
  const std::vector<int> y{0, 1, 2};
  CHECK(optimize_multiclass_gsa(p, y, mmce_measure()).value == 0.0);

  const auto s = oracle::underscored_three_class(100, 9);
  GsaOptions o;
  o.seed = 4;
  const Optimized a = optimize_multiclass_gsa(s.prob, s.truth, mmce_measure(), o);
  const Optimized b = optimize_multiclass_gsa(s.prob, s.truth, mmce_measure(), o);
  CHECK(a.value == b.value);
  CHECK(a.thresholds.values == b.thresholds.values);

  Eigen::MatrixXd two(2, 2);
  two << 0.5, 0.5, 0.2, 0.8;
  CHECK_THROWS_AS(optimize_multiclass_gsa(two, std::vector<int>{0, 1}, mmce_measure()), std::invalid_argument);
  o.iters = 0;
  CHECK_THROWS_AS(optimize_multiclass_gsa(p, y, mmce_measure(), o), std::invalid_argument);
}

TEST_CASE("visiting temperature schedule") {
  const double qv = 2.62;
  CHECK(visiting_temperature(1.0, qv, 1) == doctest::Approx(1.0).epsilon(1e-15));
  for (int i : {2, 5, 50, 500}) {
    const double expected = (std::pow(2.0, qv - 1.0) - 1.0) / (std::pow(1.0 + i, qv - 1.0) - 1.0);
    CHECK(visiting_temperature(1.0, qv, i) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(visiting_temperature(3.0, qv, i) == doctest::Approx(3.0 * expected).epsilon(1e-14));
    CHECK(visiting_temperature(1.0, qv, i) < visiting_temperature(1.0, qv, i - 1));
  }
  // the visiting step is symmetric in the first normal draw and finite
  CHECK(visiting_step(0.5, qv, 0.7, 0.3) == -visiting_step(0.5, qv, -0.7, 0.3));
  CHECK(std::isfinite(visiting_step(1.0, qv, 1.0, 1e-300)));
}
