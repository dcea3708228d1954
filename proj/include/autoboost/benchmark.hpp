#ifndef AUTOBOOST_BENCHMARK_HPP
#define AUTOBOOST_BENCHMARK_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "autoboost/pipeline.hpp"

namespace autoboost {

enum class Aggregation { Min, Mean };

Aggregation parse_aggregation(const std::string& name);

/// The B reduced bootstrap values (minimum or mean of `size` draws with
/// replacement each) that bootstrap_aggregate takes the median of.
std::vector<double> bootstrap_reduced(std::span<const double> run_values, int B, int size, std::uint64_t seed,
                                      Aggregation agg = Aggregation::Min);

/// Draws `size` run values with replacement `B` times, reduces each draw to
/// its minimum (best of the simulated parallel runs) or mean, and returns
/// the median of the reduced values.
double bootstrap_aggregate(std::span<const double> run_values, int B, int size, std::uint64_t seed,
                           Aggregation agg = Aggregation::Min);

struct BenchmarkDataset {
  std::string name;
  std::string train_path;
  std::string test_path;
  std::string target;
  std::optional<Measure> measure;
};

/// Reads a benchmark spec (TSV: name, train_path, test_path, target,
/// measure). An optional header row starting with "name" is skipped and
/// relative paths resolve against the spec file's directory.
std::vector<BenchmarkDataset> read_benchmark_spec(const std::string& path);

struct DatasetReport {
  std::string name;
  std::string measure;
  std::optional<double> baseline;  // classification only
  std::vector<double> run_values;  // test measure per repetition
  std::vector<std::uint64_t> seeds;
  std::vector<double> seconds;
  std::optional<double> aggregated;
  std::string error;  // non-empty when the dataset failed
};

struct BenchmarkReport {
  std::vector<DatasetReport> datasets;
};

struct BenchmarkOptions {
  int repetitions = 25;
  int bootstrap = 100000;
  int size = 4;
  std::uint64_t seed = 1;
  Aggregation agg = Aggregation::Min;
};

/// Fits each dataset `repetitions` times (seeds seed+1 .. seed+R), scores
/// the test split, adds the majority baseline and aggregates the runs.
/// A dataset that fails is recorded with its error and skipped.
BenchmarkReport run_benchmark(const std::vector<BenchmarkDataset>& datasets, const AutoConfig& cfg,
                              const BenchmarkOptions& options);

/// Loads a training CSV. A numeric target is read as class labels when the
/// task hint or a classification measure asks for it.
Dataset load_training_csv(const std::string& path, const std::string& target, std::optional<Measure> measure,
                          std::optional<Task> task = std::nullopt, const CsvOptions& options = {});

/// Test-set measure of a fitted pipeline.
double test_measure(const PipelineModel& p, const Dataset& test);

/// Machine-readable report, error rates as percentages with two decimals.
void write_report_tsv(std::ostream& out, const BenchmarkReport& report);
void write_report_table(std::ostream& out, const BenchmarkReport& report);

}  // namespace autoboost

#endif  // AUTOBOOST_BENCHMARK_HPP
