#ifndef AUTOBOOST_DATA_HPP
#define AUTOBOOST_DATA_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace autoboost {

/// Raised for malformed or inconsistent input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Task { Binary, Multiclass, Regression };
enum class ColumnKind { Numeric, Categorical };

std::string to_string(Task task);
Task parse_task(const std::string& name);

inline bool is_classification(Task task) { return task != Task::Regression; }

/// Level used for missing categorical cells.
inline constexpr const char* kMissingLevel = "__NA__";

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  std::vector<double> numeric;      // NaN marks a missing cell
  std::vector<std::string> levels;  // missing cells hold kMissingLevel

  static Column numeric_column(std::string name, std::vector<double> values);
  static Column categorical_column(std::string name, std::vector<std::string> values);

  std::size_t size() const { return kind == ColumnKind::Numeric ? numeric.size() : levels.size(); }
  bool is_missing(std::size_t row) const;

  /// Distinct levels, sorted lexicographically.
  std::vector<std::string> distinct_levels() const;
};

struct Target {
  std::string name;
  Task task = Task::Regression;
  std::vector<double> values;        // regression
  std::vector<int> codes;            // classification, indices into classes
  std::vector<std::string> classes;  // sorted class labels

  std::size_t size() const { return task == Task::Regression ? values.size() : codes.size(); }
  int n_classes() const { return static_cast<int>(classes.size()); }
};

/// Immutable tabular dataset. Features keep file order; the target is
/// stored separately and may be absent for prediction inputs.
class Dataset {
 public:
  Dataset() = default;

  /// Builds a dataset with a target column and validates the invariants.
  /// A numeric target under a classification task is relabelled by its
  /// shortest decimal representation.
  static Dataset with_target(std::vector<Column> features, const Column& target,
                             std::optional<Task> task = std::nullopt);

  /// Classification target over an explicit class list (a superset of the
  /// labels present), e.g. a test split that lacks some training classes.
  static Dataset with_classes(std::vector<Column> features, const Column& target,
                              std::vector<std::string> classes);
  static Dataset features_only(std::vector<Column> features);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_features() const { return features_.size(); }
  const std::vector<Column>& features() const { return features_; }
  const Column& feature(std::size_t j) const { return features_[j]; }
  bool has_target() const { return target_.has_value(); }
  const Target& target() const;
  Task task() const { return target().task; }

  /// Row subset in the given order; schema and class list are preserved.
  Dataset subset(std::span<const std::size_t> rows) const;

  /// Same rows with a replaced feature list (target carried over).
  Dataset with_features(std::vector<Column> features) const;

  bool all_numeric() const;

 private:
  std::vector<Column> features_;
  std::optional<Target> target_;
  std::size_t n_rows_ = 0;
};

/// Column-major feature matrix of an all-numeric dataset; missing cells are NaN.
Eigen::MatrixXd feature_matrix(const Dataset& d);

/// Feature schema: names and kinds, used to coerce prediction-time inputs.
struct FeatureSchema {
  std::vector<std::string> names;
  std::vector<ColumnKind> kinds;

  static FeatureSchema of(const Dataset& d);
  bool operator==(const FeatureSchema&) const = default;
};

struct CsvOptions {
  std::set<std::string> na_tokens{"", "NA", "?"};
};

/// Loads a CSV with a target column. Columns whose non-missing cells all
/// parse as numbers become numeric; everything else is categorical.
Dataset load_csv(const std::string& path, const std::string& target,
                 std::optional<Task> task_hint = std::nullopt,
                 const CsvOptions& options = {});

/// Loads feature columns named by `schema` with their kinds forced. The
/// file may carry extra columns (including a target), which are ignored.
Dataset load_csv_features(const std::string& path, const FeatureSchema& schema,
                          const CsvOptions& options = {});

struct SplitPair {
  Dataset train;
  Dataset valid;
  std::uint64_t seed = 0;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> valid_rows;
};

/// Holdout split. The validation part gets round(valid_fraction * n) rows;
/// stratification keeps each class within one row of its proportional share.
SplitPair split_holdout(const Dataset& d, double valid_fraction, std::uint64_t seed,
                        bool stratify);

/// Index of the most frequent class in `train` (ties go to the smallest label).
int majority_class(const Dataset& train);

/// Misclassification rate of always predicting the majority training class.
double majority_baseline(const Dataset& train, const Dataset& test);

}  // namespace autoboost

#endif  // AUTOBOOST_DATA_HPP
