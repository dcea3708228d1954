#ifndef AUTOBOOST_PIPELINE_HPP
#define AUTOBOOST_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "autoboost/data.hpp"
#include "autoboost/encoding.hpp"
#include "autoboost/gbt.hpp"
#include "autoboost/metrics.hpp"
#include "autoboost/smbo.hpp"
#include "autoboost/threshold.hpp"

namespace autoboost {

struct AutoConfig {
  std::optional<Measure> measure;  // defaults per task
  int budget = 160;
  double deadline = 3600.0;  // seconds
  double valid_fraction = 0.2;
  int k = 10;
  encoding::Strategy high_card = encoding::Strategy::Impact;
  double smoothing = 1.0;
  int max_rounds = 1000;
  int patience = 10;
  int n_init = 16;
  int gsa_iters = 500;
  std::uint64_t seed = 1;

  void validate() const;
};

inline constexpr int kBundleFormatVersion = 1;

/// Deployable result of a fit: encoders, the incumbent booster, its
/// thresholds and the full tuning record.
struct PipelineModel {
  int format_version = kBundleFormatVersion;
  FeatureSchema schema;
  std::string target_name;
  Task task = Task::Regression;
  std::vector<std::string> classes;
  Measure measure = Measure::Rmse;

  encoding::EncoderModel encoders;
  gbt::BoostedModel model;
  std::optional<threshold::ThresholdVector> thresholds;
  gbt::GBTConfig config;

  double validation_value = 0.0;  // incumbent tuning objective
  std::uint64_t split_seed = 0;
  std::vector<std::size_t> validation_rows;
  std::vector<std::string> param_names;
  std::vector<smbo::Evaluation> history;
};

struct Predictions {
  std::vector<int> codes;            // classification, indices into classes
  std::vector<std::string> labels;   // classification
  Eigen::MatrixXd probabilities;     // classification, n x K
  Eigen::VectorXd values;            // regression
};

/// Split, encode, tune with early stopping and per-evaluation threshold
/// optimization, and keep the incumbent's model (no refit).
PipelineModel autogbt_fit(const Dataset& d, const AutoConfig& cfg = {});

/// Feature columns are matched by name; kinds must agree with training.
Predictions autogbt_predict(const PipelineModel& p, const Dataset& newdata);

/// Thresholded validation measure of the stored model on an encoded split.
double validation_score(const PipelineModel& p, const Dataset& valid);

// Bundle I/O: a JSON document with a format version and a CRC-32 of the payload.

class BundleError : public DataError {
 public:
  enum class Kind { Corrupt, Version };
  BundleError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string to_bundle(const PipelineModel& p);
PipelineModel from_bundle(const std::string& text);
void save(const PipelineModel& p, const std::string& path);
PipelineModel load(const std::string& path);

}  // namespace autoboost

#endif  // AUTOBOOST_PIPELINE_HPP
