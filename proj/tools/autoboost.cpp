// autoboost command-line tool: fit, predict, benchmark.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "autoboost/benchmark.hpp"
#include "autoboost/csv.hpp"
#include "autoboost/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kRuntime = 3 };

autoboost::CsvOptions csv_options(const std::string& na_tokens) {
  autoboost::CsvOptions o;
  if (na_tokens.empty()) return o;
  o.na_tokens.clear();
  o.na_tokens.insert("");
  std::stringstream ss(na_tokens);
  std::string tok;
  while (std::getline(ss, tok, ',')) o.na_tokens.insert(tok);
  return o;
}

struct FitArgs {
  std::string data, target, out, measure, task, history, na;
  int budget = 160;
  double time_limit = 3600.0;
  std::uint64_t seed = 1;
};

int run_fit(const FitArgs& a) {
  std::optional<autoboost::Measure> measure;
  if (!a.measure.empty()) measure = autoboost::parse_measure(a.measure);
  std::optional<autoboost::Task> task;
  if (!a.task.empty()) task = autoboost::parse_task(a.task);

  const auto d = autoboost::load_training_csv(a.data, a.target, measure, task, csv_options(a.na));
  autoboost::AutoConfig cfg;
  cfg.measure = measure;
  cfg.budget = a.budget;
  cfg.deadline = a.time_limit;
  cfg.seed = a.seed;
  const auto p = autoboost::autogbt_fit(d, cfg);
  autoboost::save(p, a.out);

  if (!a.history.empty()) {
    autoboost::smbo::TuneState state;
    state.space = autoboost::smbo::ParamSpace::simple();
    state.evaluated = p.history;
    std::ofstream h(a.history);
    autoboost::smbo::write_history_csv(h, state);
  }
  std::cout << "task " << autoboost::to_string(p.task) << ", measure " << autoboost::to_string(p.measure)
            << ", evaluations " << p.history.size() << ", validation " << p.validation_value
            << ", rounds " << p.model.best_iteration << "\n";
  return kOk;
}

struct PredictArgs {
  std::string model, data, out, na;
};

int run_predict(const PredictArgs& a) {
  const auto p = autoboost::load(a.model);
  const auto d = autoboost::load_csv_features(a.data, p.schema, csv_options(a.na));
  const auto pred = autoboost::autogbt_predict(p, d);

  std::ofstream out(a.out, std::ios::binary);
  if (!out) throw autoboost::DataError("cannot write " + a.out);
  autoboost::csv::Row header{"prediction"};
  for (const auto& c : p.classes) header.push_back("prob_" + c);
  autoboost::csv::write_row(out, header);
  const std::size_t n = p.task == autoboost::Task::Regression ? static_cast<std::size_t>(pred.values.size())
                                                               : pred.labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    autoboost::csv::Row row;
    if (p.task == autoboost::Task::Regression) {
      row.push_back(autoboost::csv::format_double(pred.values(static_cast<Eigen::Index>(i))));
    } else {
      row.push_back(pred.labels[i]);
      for (Eigen::Index k = 0; k < pred.probabilities.cols(); ++k) {
        row.push_back(autoboost::csv::format_double(pred.probabilities(static_cast<Eigen::Index>(i), k)));
      }
    }
    autoboost::csv::write_row(out, row);
  }
  return kOk;
}

struct BenchArgs {
  std::string spec, out, agg = "min";
  int reps = 25, bootstrap = 100000, size = 4, budget = 160;
  double time_limit = 3600.0;
  std::uint64_t seed = 1;
};

int run_benchmark(const BenchArgs& a) {
  const auto datasets = autoboost::read_benchmark_spec(a.spec);
  autoboost::AutoConfig cfg;
  cfg.budget = a.budget;
  cfg.deadline = a.time_limit;
  autoboost::BenchmarkOptions options;
  options.repetitions = a.reps;
  options.bootstrap = a.bootstrap;
  options.size = a.size;
  options.seed = a.seed;
  options.agg = autoboost::parse_aggregation(a.agg);
  const auto report = autoboost::run_benchmark(datasets, cfg, options);
  autoboost::write_report_table(std::cout, report);
  std::ofstream out(a.out);
  if (!out) throw autoboost::DataError("cannot write " + a.out);
  autoboost::write_report_tsv(out, report);
  for (const auto& r : report.datasets) {
    if (!r.error.empty()) return kData;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automatic gradient boosting: tuned boosted trees from a raw CSV"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Tune and fit a pipeline");
  fit_cmd->add_option("--data", fit.data, "Training CSV")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--target", fit.target, "Target column")->required();
  fit_cmd->add_option("--measure", fit.measure, "mmce | logloss | rmse")
      ->check(CLI::IsMember({"mmce", "logloss", "rmse"}));
  fit_cmd->add_option("--task", fit.task, "binary | multiclass | regression")
      ->check(CLI::IsMember({"binary", "multiclass", "regression"}));
  fit_cmd->add_option("--budget", fit.budget, "Maximum tuning evaluations")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--time-limit", fit.time_limit, "Tuning deadline in seconds")->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--seed", fit.seed, "Random seed");
  fit_cmd->add_option("--na", fit.na, "Comma-separated missing-value tokens (default: empty, NA, ?)");
  fit_cmd->add_option("--history", fit.history, "Write the tuning history CSV here");
  fit_cmd->add_option("--out", fit.out, "Output bundle")->required();

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Predict with a saved pipeline");
  predict_cmd->add_option("--model", predict.model, "Pipeline bundle")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--data", predict.data, "CSV with the training feature columns")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--na", predict.na, "Comma-separated missing-value tokens");
  predict_cmd->add_option("--out", predict.out, "Predictions CSV")->required();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "Repeated fits with bootstrap aggregation");
  bench_cmd->add_option("--spec", bench.spec, "TSV: name, train_path, test_path, target, measure")
      ->required()
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--reps", bench.reps, "Repetitions per dataset")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--bootstrap", bench.bootstrap, "Bootstrap samples")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--size", bench.size, "Runs per bootstrap sample")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--agg", bench.agg, "Per-sample reduction: min | mean")
      ->check(CLI::IsMember({"min", "mean"}));
  bench_cmd->add_option("--budget", bench.budget, "Tuning evaluations per fit")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--time-limit", bench.time_limit, "Deadline per fit in seconds");
  bench_cmd->add_option("--seed", bench.seed, "Base seed");
  bench_cmd->add_option("--out", bench.out, "Report TSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*fit_cmd) return run_fit(fit);
    if (*predict_cmd) return run_predict(predict);
    if (*bench_cmd) return run_benchmark(bench);
  } catch (const autoboost::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
