#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "autoboost/metrics.hpp"

using namespace autoboost;

TEST_CASE("mmce") {
  using V = std::vector<std::string>;
  CHECK(mmce(V{"a", "b"}, V{"a", "b"}) == 0.0);
  CHECK(mmce(V{"a", "b"}, V{"a", "a"}) == 0.5);
  CHECK(mmce(V{"b", "b", "b"}, V{"a", "a", "a"}) == 1.0);
  CHECK_THROWS_AS(mmce(V{"a"}, V{"a", "b"}), std::invalid_argument);
  CHECK_THROWS_AS(mmce(V{}, V{}), std::invalid_argument);
}

TEST_CASE("mmce is invariant under joint permutation") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> p(1 + rng() % 40), t(p.size());
    for (auto& v : p) v = static_cast<int>(rng() % 3);
    for (auto& v : t) v = static_cast<int>(rng() % 3);
    std::vector<std::size_t> perm(p.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> pp, tt;
    for (auto i : perm) pp.push_back(p[i]), tt.push_back(t[i]);
    CHECK(mmce(pp, tt) == mmce(p, t));
  }
}

TEST_CASE("logloss") {
  Eigen::MatrixXd sure(2, 2);
  sure << 1, 0, 0, 1;
  const std::vector<int> truth{0, 1};
  CHECK(logloss(sure, truth) == doctest::Approx(0.0).epsilon(1e-12));

  Eigen::MatrixXd half(1, 2);
  half << 0.5, 0.5;
  const std::vector<int> zero{0};
  CHECK(logloss(half, zero) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(logloss(half, zero) == doctest::Approx(0.693147).epsilon(1e-6));

  Eigen::MatrixXd wrong(1, 2);
  wrong << 0.0, 1.0;
  CHECK(logloss(wrong, zero) == doctest::Approx(-std::log(1e-15)).epsilon(1e-12));
  CHECK(logloss(wrong, zero) == doctest::Approx(34.54).epsilon(1e-3));

  Eigen::MatrixXd bad(1, 2);
  bad << 0.5, 0.4;
  CHECK_THROWS_AS(logloss(bad, zero), std::invalid_argument);
  const std::vector<int> unknown{2};
  CHECK_THROWS_AS(logloss(half, unknown), std::invalid_argument);
}

TEST_CASE("logloss decreases strictly in p(true)") {
  double previous = std::numeric_limits<double>::infinity();
  const std::vector<int> truth{1};
  for (int i = 1; i < 100; ++i) {
    const double p = i / 100.0;
    Eigen::MatrixXd prob(1, 2);
    prob << 1.0 - p, p;
    const double v = logloss(prob, truth);
    CHECK(v < previous);
    previous = v;
  }
}

TEST_CASE("rmse") {
  Eigen::VectorXd a(2), b(2);
  a << 0, 0;
  b << 3, 4;
  CHECK(rmse(a, a) == 0.0);
  CHECK(rmse(a, b) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));
  Eigen::VectorXd one(1), three(1);
  one << 1;
  three << 3;
  CHECK(rmse(one, three) == 2.0);
  CHECK_THROWS_AS(rmse(a, one), std::invalid_argument);
}

TEST_CASE("measure names and defaults") {
  for (auto m : {Measure::Mmce, Measure::Logloss, Measure::Rmse}) CHECK(parse_measure(to_string(m)) == m);
  CHECK_THROWS_AS(parse_measure("auc"), std::invalid_argument);
  CHECK(default_measure(Task::Binary) == Measure::Mmce);
  CHECK(default_measure(Task::Multiclass) == Measure::Mmce);
  CHECK(default_measure(Task::Regression) == Measure::Rmse);
  CHECK_THROWS_AS(check_measure(Measure::Rmse, Task::Binary), std::invalid_argument);
  CHECK_THROWS_AS(check_measure(Measure::Mmce, Task::Regression), std::invalid_argument);
}

TEST_CASE("default labels") {
  Eigen::MatrixXd bin(3, 2);
  bin << 0.5, 0.5, 0.6, 0.4, 0.2, 0.8;
  CHECK(default_labels(bin) == std::vector<int>{1, 0, 1});
  Eigen::MatrixXd multi(2, 3);
  multi << 0.2, 0.4, 0.4, 0.5, 0.3, 0.2;
  CHECK(default_labels(multi) == std::vector<int>{1, 0});
}
