#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "autoboost/benchmark.hpp"
#include "autoboost/csv.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace autoboost;

namespace {

std::vector<double> one_zero_among(int ones) {
  std::vector<double> v(static_cast<std::size_t>(ones), 1.0);
  v.push_back(0.0);
  return v;
}

AutoConfig quick() {
  AutoConfig cfg;
  cfg.budget = 4;
  cfg.n_init = 4;
  cfg.max_rounds = 100;
  return cfg;
}

std::string write_spec(const std::string& name, const std::string& body) {
  return testing::write_file(name, "name\ttrain_path\ttest_path\ttarget\tmeasure\n" + body);
}

}  // namespace

TEST_CASE("bootstrap of equal runs returns that value") {
  const std::vector<double> runs(7, 0.1);
  for (int size : {1, 4, 9}) {
    CHECK(bootstrap_aggregate(runs, 11, size, 3) == 0.1);
    CHECK(bootstrap_aggregate(runs, 10, size, 3, Aggregation::Mean) == doctest::Approx(0.1).epsilon(1e-15));
  }
  CHECK(bootstrap_aggregate(std::vector<double>{0.42}, 1, 1, 1) == 0.42);
}

TEST_CASE("one zero among twenty-four ones") {
  const auto runs = one_zero_among(24);
  CHECK(bootstrap_aggregate(runs, 100000, 4, 1) == 1.0);
  const auto reduced = bootstrap_reduced(runs, 100000, 4, 1);
  const double zeros = static_cast<double>(std::count(reduced.begin(), reduced.end(), 0.0));
  const double exact = oracle::prob_min_hits(25, 1, 4);
  CHECK(exact == doctest::Approx(0.1507).epsilon(1e-3));
  CHECK(std::abs(zeros / 100000.0 - exact) <= 0.01);
}

TEST_CASE("plain bootstrap median of symmetric runs") {
  const std::vector<double> runs{0.1, 0.2, 0.3};
  CHECK(std::abs(bootstrap_aggregate(runs, 100000, 1, 2) - 0.2) <= 0.01);
}

TEST_CASE("even B takes the mean of the central order statistics") {
  // with two samples the median is the mean of both reduced values
  const std::vector<double> runs{0.0, 1.0};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = bootstrap_reduced(runs, 2, 1, seed);
    CHECK(bootstrap_aggregate(runs, 2, 1, seed) == 0.5 * (r[0] + r[1]));
  }
}

TEST_CASE("best of four is never above best of one") {
  const std::vector<std::vector<double>> vectors{
      {0.3, 0.1, 0.2, 0.5, 0.4}, one_zero_among(24), {0.12, 0.11, 0.15, 0.11, 0.2, 0.13, 0.19}};
  for (const auto& v : vectors) {
    CHECK(bootstrap_aggregate(v, 100000, 4, 7) <= bootstrap_aggregate(v, 100000, 1, 7) + 1e-12);
    const double agg = bootstrap_aggregate(v, 1001, 4, 7);
    CHECK(agg >= *std::min_element(v.begin(), v.end()));
    CHECK(agg <= *std::max_element(v.begin(), v.end()));
  }
}

TEST_CASE("bootstrap is deterministic per seed and validates input") {
  const std::vector<double> v{0.3, 0.1, 0.2, 0.5};
  CHECK(bootstrap_reduced(v, 500, 4, 9) == bootstrap_reduced(v, 500, 4, 9));
  CHECK(bootstrap_reduced(v, 500, 4, 9) != bootstrap_reduced(v, 500, 4, 10));
  CHECK_THROWS_AS(bootstrap_aggregate({}, 10, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap_aggregate(v, 0, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap_aggregate(v, 10, 0, 1), std::invalid_argument);
  CHECK(parse_aggregation("mean") == Aggregation::Mean);
  CHECK_THROWS_AS(parse_aggregation("max"), std::invalid_argument);
}

TEST_CASE("benchmark spec parsing") {
  const std::string path = write_spec("spec_parse.tsv", "a\ttrain.csv\t/abs/test.csv\ty\tlogloss\nb\tx.csv\ty.csv\tclass\n\n");
  const auto specs = read_benchmark_spec(path);
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].name == "a");
  CHECK(specs[0].train_path == (std::filesystem::path(path).parent_path() / "train.csv").string());
  CHECK(specs[0].test_path == "/abs/test.csv");
  CHECK(specs[0].measure == Measure::Logloss);
  CHECK_FALSE(specs[1].measure.has_value());
  CHECK(specs[1].target == "class");
  CHECK_THROWS_AS(read_benchmark_spec(write_spec("spec_bad.tsv", "a\tb\n")), DataError);
  CHECK_THROWS_AS(read_benchmark_spec(testing::temp_path("missing_spec.tsv")), DataError);
}

TEST_CASE("benchmark run on a separable dataset beats the baseline") {
  testing::write_csv("bench_train.csv", testing::separable_binary(200, 1));
  testing::write_csv("bench_test.csv", testing::separable_binary(200, 2));
  const std::string spec = write_spec("bench.tsv",
                                      "sep\tbench_train.csv\tbench_test.csv\ty\tmmce\n"
                                      "broken\tnope.csv\tbench_test.csv\ty\t\n");
  BenchmarkOptions opt;
  opt.repetitions = 2;
  opt.bootstrap = 1001;
  const BenchmarkReport report = run_benchmark(read_benchmark_spec(spec), quick(), opt);
  REQUIRE(report.datasets.size() == 2);
  const DatasetReport& r = report.datasets[0];
  CHECK(r.error.empty());
  CHECK(r.measure == "mmce");
  CHECK(r.seeds == std::vector<std::uint64_t>{2, 3});
  REQUIRE(r.run_values.size() == 2);
  REQUIRE(r.aggregated.has_value());
  REQUIRE(r.baseline.has_value());
  CHECK(*r.aggregated < *r.baseline);
  CHECK(*r.aggregated >= *std::min_element(r.run_values.begin(), r.run_values.end()));
  CHECK(*r.aggregated <= *std::max_element(r.run_values.begin(), r.run_values.end()));
  CHECK_FALSE(report.datasets[1].error.empty());

  // the same inputs and seeds give the same report
  const BenchmarkReport again = run_benchmark(read_benchmark_spec(spec), quick(), opt);
  CHECK(again.datasets[0].run_values == r.run_values);
  CHECK(again.datasets[0].aggregated == r.aggregated);

  std::ostringstream tsv;
  write_report_tsv(tsv, report);
  std::istringstream in(tsv.str());
  const auto rows = csv::read(in, '\t');
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == "name");
  CHECK(rows[1][0] == "sep");
  // percentages with two decimals
  CHECK(rows[1][2].size() >= 4);
  CHECK(rows[1][2][rows[1][2].size() - 3] == '.');
  CHECK(rows[2].back() == report.datasets[1].error);

  std::ostringstream table;
  write_report_table(table, report);
  CHECK(table.str().find("broken") != std::string::npos);
  CHECK(table.str().find("error:") != std::string::npos);
}

TEST_CASE("a single repetition aggregates to its own value") {
  testing::write_csv("bench1_train.csv", testing::separable_binary(120, 3));
  testing::write_csv("bench1_test.csv", testing::separable_binary(120, 4));
  const std::string spec = write_spec("bench1.tsv", "one\tbench1_train.csv\tbench1_test.csv\ty\t\n");
  BenchmarkOptions opt;
  opt.repetitions = 1;
  opt.bootstrap = 100;
  const auto r = run_benchmark(read_benchmark_spec(spec), quick(), opt).datasets.at(0);
  REQUIRE(r.aggregated.has_value());
  CHECK(*r.aggregated == r.run_values.at(0));
}

TEST_CASE("numeric class labels are read as classes under a classification measure") {
  std::vector<double> x, y;
  for (int i = 0; i < 40; ++i) x.push_back(i), y.push_back(i < 20 ? 0 : 1);
  const std::string path = testing::write_csv(
      "numeric_labels.csv", Dataset::with_target({Column::numeric_column("x", x)}, Column::numeric_column("y", y)));
  CHECK(load_training_csv(path, "y", std::nullopt).task() == Task::Regression);
  const Dataset d = load_training_csv(path, "y", Measure::Mmce);
  CHECK(d.task() == Task::Binary);
  CHECK(d.target().classes == std::vector<std::string>{"0", "1"});
}
