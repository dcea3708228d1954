#include "autoboost/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "autoboost/csv.hpp"

namespace autoboost {

Aggregation parse_aggregation(const std::string& name) {
  if (name == "min") return Aggregation::Min;
  if (name == "mean") return Aggregation::Mean;
  throw std::invalid_argument("unknown aggregation: " + name);
}

std::vector<double> bootstrap_reduced(std::span<const double> run_values, int B, int size, std::uint64_t seed,
                                      Aggregation agg) {
  if (run_values.empty()) throw std::invalid_argument("bootstrap_aggregate: no run values");
  if (B < 1 || size < 1) throw std::invalid_argument("bootstrap_aggregate: B and size must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, run_values.size() - 1);
  std::vector<double> reduced(static_cast<std::size_t>(B));
  for (auto& r : reduced) {
    double acc = agg == Aggregation::Min ? std::numeric_limits<double>::infinity() : 0.0;
    for (int s = 0; s < size; ++s) {
      const double v = run_values[pick(rng)];
      acc = agg == Aggregation::Min ? std::min(acc, v) : acc + v;
    }
    r = agg == Aggregation::Min ? acc : acc / size;
  }
  return reduced;
}

double bootstrap_aggregate(std::span<const double> run_values, int B, int size, std::uint64_t seed,
                           Aggregation agg) {
  std::vector<double> reduced = bootstrap_reduced(run_values, B, size, seed, agg);
  const std::size_t mid = reduced.size() / 2;
  std::nth_element(reduced.begin(), reduced.begin() + static_cast<std::ptrdiff_t>(mid), reduced.end());
  const double upper = reduced[mid];
  if (reduced.size() % 2 == 1) return upper;
  const double lower = *std::max_element(reduced.begin(), reduced.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::vector<BenchmarkDataset> read_benchmark_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open benchmark spec " + path);
  const auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };
  std::vector<BenchmarkDataset> out;
  for (const auto& row : csv::read(in, '\t')) {
    if (row.empty() || (row.size() == 1 && row[0].empty())) continue;
    if (row[0] == "name") continue;
    if (row.size() < 4) throw DataError("benchmark spec: expected name, train, test, target[, measure]");
    BenchmarkDataset d{row[0], resolve(row[1]), resolve(row[2]), row[3], std::nullopt};
    if (row.size() > 4 && !row[4].empty()) d.measure = parse_measure(row[4]);
    out.push_back(std::move(d));
  }
  return out;
}

Dataset load_training_csv(const std::string& path, const std::string& target, std::optional<Measure> measure,
                          std::optional<Task> task, const CsvOptions& options) {
  Dataset d = load_csv(path, target, task, options);
  if (!task && measure && *measure != Measure::Rmse && d.task() == Task::Regression) {
    std::vector<double> v = d.target().values;
    std::sort(v.begin(), v.end());
    const auto distinct = std::unique(v.begin(), v.end()) - v.begin();
    d = load_csv(path, target, distinct == 2 ? Task::Binary : Task::Multiclass, options);
  }
  return d;
}

double test_measure(const PipelineModel& p, const Dataset& test) {
  const Predictions pred = autogbt_predict(p, test);
  const Target& t = test.target();
  if (p.task == Task::Regression) return rmse(pred.values, gbt::target_vector(t));
  // compare by label text: the test file may not contain every class
  std::vector<int> truth(t.codes.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& label = t.classes[static_cast<std::size_t>(t.codes[i])];
    auto it = std::find(p.classes.begin(), p.classes.end(), label);
    truth[i] = it == p.classes.end() ? -1 : static_cast<int>(it - p.classes.begin());
  }
  if (p.measure == Measure::Logloss) {
    if (std::find(truth.begin(), truth.end(), -1) != truth.end()) {
      throw DataError("test set has labels unseen in training");
    }
    return logloss(pred.probabilities, truth);
  }
  return mmce(pred.codes, truth);
}

namespace {

Dataset load_test(const BenchmarkDataset& spec, const Dataset& train) {
  // keep the training kinds and task for the test split
  const FeatureSchema schema = FeatureSchema::of(train);
  Dataset features = load_csv_features(spec.test_path, schema);
  std::ifstream in(spec.test_path, std::ios::binary);
  auto rows = csv::read(in);
  const auto& header = rows.front();
  auto it = std::find(header.begin(), header.end(), spec.target);
  if (it == header.end()) throw DataError("target '" + spec.target + "' not found in " + spec.test_path);
  const auto col = static_cast<std::size_t>(it - header.begin());
  std::vector<std::string> labels;
  std::vector<double> values;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (train.task() == Task::Regression) {
      auto v = csv::parse_double(rows[i][col]);
      if (!v) throw DataError("non-numeric regression target in " + spec.test_path);
      values.push_back(*v);
    } else {
      labels.push_back(rows[i][col]);
    }
  }
  if (train.task() == Task::Regression) {
    return Dataset::with_target(features.features(), Column::numeric_column(spec.target, std::move(values)),
                                Task::Regression);
  }
  // the test split may lack some training classes or carry unseen ones
  std::vector<std::string> classes = train.target().classes;
  classes.insert(classes.end(), labels.begin(), labels.end());
  return Dataset::with_classes(features.features(), Column::categorical_column(spec.target, std::move(labels)),
                               std::move(classes));
}

}  // namespace

BenchmarkReport run_benchmark(const std::vector<BenchmarkDataset>& datasets, const AutoConfig& cfg,
                              const BenchmarkOptions& options) {
  if (options.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  BenchmarkReport report;
  for (const auto& spec : datasets) {
    DatasetReport r;
    r.name = spec.name;
    try {
      const Dataset train = load_training_csv(spec.train_path, spec.target, spec.measure);
      const Dataset test = load_test(spec, train);
      AutoConfig run_cfg = cfg;
      if (spec.measure) run_cfg.measure = spec.measure;
      r.measure = to_string(run_cfg.measure.value_or(default_measure(train.task())));
      if (is_classification(train.task())) r.baseline = majority_baseline(train, test);
      for (int rep = 1; rep <= options.repetitions; ++rep) {
        run_cfg.seed = options.seed + static_cast<std::uint64_t>(rep);
        const auto t0 = std::chrono::steady_clock::now();
        const PipelineModel p = autogbt_fit(train, run_cfg);
        r.run_values.push_back(test_measure(p, test));
        r.seeds.push_back(run_cfg.seed);
        r.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      }
      r.aggregated = bootstrap_aggregate(r.run_values, options.bootstrap, options.size, options.seed, options.agg);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    report.datasets.push_back(std::move(r));
  }
  return report;
}

namespace {

std::string percent(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << 100.0 * v;
  return s.str();
}

std::string plain(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v;
  return s.str();
}

std::string show(const DatasetReport& r, double v) { return r.measure == "mmce" ? percent(v) : plain(v); }

}  // namespace

void write_report_tsv(std::ostream& out, const BenchmarkReport& report) {
  out << "name\tmeasure\tbaseline\taggregated\truns\tseeds\tseconds\terror\n";
  for (const auto& r : report.datasets) {
    auto join = [](const auto& xs, auto fmt) {
      std::string s;
      for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt(xs[i]);
      return s;
    };
    out << r.name << '\t' << r.measure << '\t' << (r.baseline ? percent(*r.baseline) : "") << '\t'
        << (r.aggregated ? show(r, *r.aggregated) : "") << '\t'
        << join(r.run_values, [&](double v) { return show(r, v); }) << '\t'
        << join(r.seeds, [](std::uint64_t s) { return std::to_string(s); }) << '\t'
        << join(r.seconds, [](double v) { return plain(v); }) << '\t' << r.error << '\n';
  }
}

void write_report_table(std::ostream& out, const BenchmarkReport& report) {
  out << std::left << std::setw(20) << "dataset" << std::setw(10) << "measure" << std::right << std::setw(10)
      << "baseline" << std::setw(12) << "autoboost" << std::setw(6) << "runs" << '\n';
  for (const auto& r : report.datasets) {
    out << std::left << std::setw(20) << r.name << std::setw(10) << r.measure << std::right << std::setw(10)
        << (r.baseline ? percent(*r.baseline) : "-") << std::setw(12)
        << (r.aggregated ? show(r, *r.aggregated) : "-") << std::setw(6) << r.run_values.size();
    if (!r.error.empty()) out << "  error: " << r.error;
    out << '\n';
  }
}

}  // namespace autoboost
