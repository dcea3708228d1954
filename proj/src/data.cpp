#include "autoboost/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "autoboost/csv.hpp"

namespace autoboost {

std::string to_string(Task task) {
  switch (task) {
    case Task::Binary: return "binary";
    case Task::Multiclass: return "multiclass";
    case Task::Regression: return "regression";
  }
  return "unknown";
}

Task parse_task(const std::string& name) {
  if (name == "binary") return Task::Binary;
  if (name == "multiclass") return Task::Multiclass;
  if (name == "regression") return Task::Regression;
  throw std::invalid_argument("unknown task: " + name);
}

Column Column::numeric_column(std::string name, std::vector<double> values) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Numeric;
  c.numeric = std::move(values);
  return c;
}

Column Column::categorical_column(std::string name, std::vector<std::string> values) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Categorical;
  c.levels = std::move(values);
  return c;
}

bool Column::is_missing(std::size_t row) const {
  return kind == ColumnKind::Numeric ? std::isnan(numeric[row]) : levels[row] == kMissingLevel;
}

std::vector<std::string> Column::distinct_levels() const {
  std::vector<std::string> out(levels);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

void check_lengths(const std::vector<Column>& features, std::size_t n) {
  for (const auto& c : features) {
    if (c.size() != n) {
      throw DataError("column '" + c.name + "' has " + std::to_string(c.size()) +
                      " entries, expected " + std::to_string(n));
    }
  }
}

Target make_target(const Column& column, std::optional<Task> task,
                   const std::vector<std::string>* class_list = nullptr) {
  Target t;
  t.name = column.name;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (column.is_missing(i)) throw DataError("target '" + column.name + "' has missing values");
  }
  Task resolved;
  if (task) {
    resolved = *task;
  } else if (column.kind == ColumnKind::Numeric) {
    resolved = Task::Regression;
  } else {
    resolved = Task::Binary;  // refined below by level count
  }
  t.task = resolved;

  if (resolved == Task::Regression) {
    if (column.kind != ColumnKind::Numeric) throw DataError("regression target must be numeric");
    t.values = column.numeric;
    return t;
  }

  std::vector<std::string> labels;
  if (column.kind == ColumnKind::Numeric) {
    labels.reserve(column.numeric.size());
    for (double v : column.numeric) labels.push_back(csv::format_double(v));
  } else {
    labels = column.levels;
  }
  t.classes = class_list ? *class_list : labels;
  std::sort(t.classes.begin(), t.classes.end());
  t.classes.erase(std::unique(t.classes.begin(), t.classes.end()), t.classes.end());
  if (!task) t.task = t.classes.size() == 2 ? Task::Binary : Task::Multiclass;
  if (t.task == Task::Binary && t.classes.size() != 2) {
    throw DataError("binary task needs exactly 2 target levels, found " +
                    std::to_string(t.classes.size()));
  }
  if (t.task == Task::Multiclass && t.classes.size() < 3) {
    throw DataError("multiclass task needs at least 3 target levels, found " +
                    std::to_string(t.classes.size()));
  }
  t.codes.reserve(labels.size());
  for (const auto& l : labels) {
    auto it = std::lower_bound(t.classes.begin(), t.classes.end(), l);
    if (it == t.classes.end() || *it != l) throw DataError("label '" + l + "' is not in the class list");
    t.codes.push_back(static_cast<int>(it - t.classes.begin()));
  }
  return t;
}

}  // namespace

Dataset Dataset::with_target(std::vector<Column> features, const Column& target,
                             std::optional<Task> task) {
  Dataset d;
  d.n_rows_ = target.size();
  check_lengths(features, d.n_rows_);
  for (const auto& c : features) {
    if (c.name == target.name) throw DataError("target '" + target.name + "' is also a feature");
  }
  d.features_ = std::move(features);
  d.target_ = make_target(target, task);
  return d;
}

Dataset Dataset::with_classes(std::vector<Column> features, const Column& target,
                              std::vector<std::string> classes) {
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  Dataset d;
  d.n_rows_ = target.size();
  check_lengths(features, d.n_rows_);
  d.features_ = std::move(features);
  d.target_ = make_target(target, classes.size() == 2 ? Task::Binary : Task::Multiclass, &classes);
  return d;
}

Dataset Dataset::features_only(std::vector<Column> features) {
  Dataset d;
  d.n_rows_ = features.empty() ? 0 : features.front().size();
  check_lengths(features, d.n_rows_);
  d.features_ = std::move(features);
  return d;
}

const Target& Dataset::target() const {
  if (!target_) throw DataError("dataset has no target column");
  return *target_;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset d;
  d.n_rows_ = rows.size();
  d.features_.reserve(features_.size());
  for (const auto& c : features_) {
    Column s;
    s.name = c.name;
    s.kind = c.kind;
    if (c.kind == ColumnKind::Numeric) {
      s.numeric.reserve(rows.size());
      for (auto r : rows) s.numeric.push_back(c.numeric[r]);
    } else {
      s.levels.reserve(rows.size());
      for (auto r : rows) s.levels.push_back(c.levels[r]);
    }
    d.features_.push_back(std::move(s));
  }
  if (target_) {
    Target t;
    t.name = target_->name;
    t.task = target_->task;
    t.classes = target_->classes;
    if (t.task == Task::Regression) {
      for (auto r : rows) t.values.push_back(target_->values[r]);
    } else {
      for (auto r : rows) t.codes.push_back(target_->codes[r]);
    }
    d.target_ = std::move(t);
  }
  return d;
}

Dataset Dataset::with_features(std::vector<Column> features) const {
  check_lengths(features, n_rows_);
  Dataset d;
  d.n_rows_ = n_rows_;
  d.features_ = std::move(features);
  d.target_ = target_;
  return d;
}

bool Dataset::all_numeric() const {
  return std::all_of(features_.begin(), features_.end(),
                     [](const Column& c) { return c.kind == ColumnKind::Numeric; });
}

Eigen::MatrixXd feature_matrix(const Dataset& d) {
  Eigen::MatrixXd X(d.n_rows(), d.n_features());
  for (std::size_t j = 0; j < d.n_features(); ++j) {
    const auto& c = d.feature(j);
    if (c.kind != ColumnKind::Numeric) {
      throw DataError("feature '" + c.name + "' is not numeric");
    }
    X.col(j) = Eigen::Map<const Eigen::VectorXd>(c.numeric.data(), c.numeric.size());
  }
  return X;
}

FeatureSchema FeatureSchema::of(const Dataset& d) {
  FeatureSchema s;
  for (const auto& c : d.features()) {
    s.names.push_back(c.name);
    s.kinds.push_back(c.kind);
  }
  return s;
}

namespace {

struct RawTable {
  std::vector<std::string> header;
  std::vector<csv::Row> rows;
};

RawTable read_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  auto rows = csv::read(in);
  if (rows.empty()) throw DataError("file has no header row: " + path);
  RawTable t;
  t.header = std::move(rows.front());
  rows.erase(rows.begin());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != t.header.size()) {
      throw DataError(path + ": row " + std::to_string(i + 2) + " has " +
                      std::to_string(rows[i].size()) + " fields, header has " +
                      std::to_string(t.header.size()));
    }
  }
  t.rows = std::move(rows);
  return t;
}

Column build_column(const RawTable& t, std::size_t j, const CsvOptions& options,
                    std::optional<ColumnKind> forced) {
  const std::string& name = t.header[j];
  std::vector<double> values(t.rows.size(), std::numeric_limits<double>::quiet_NaN());
  bool numeric = true;
  for (std::size_t i = 0; i < t.rows.size() && numeric; ++i) {
    const auto& cell = t.rows[i][j];
    if (options.na_tokens.count(cell)) continue;
    if (auto v = csv::parse_double(cell)) {
      values[i] = *v;
    } else {
      numeric = false;
    }
  }
  ColumnKind kind = forced.value_or(numeric ? ColumnKind::Numeric : ColumnKind::Categorical);
  if (kind == ColumnKind::Numeric) {
    if (!numeric) throw DataError("column '" + name + "' must be numeric");
    return Column::numeric_column(name, std::move(values));
  }
  std::vector<std::string> levels;
  levels.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    levels.push_back(options.na_tokens.count(row[j]) ? std::string(kMissingLevel) : row[j]);
  }
  return Column::categorical_column(name, std::move(levels));
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target,
                 std::optional<Task> task_hint, const CsvOptions& options) {
  RawTable t = read_table(path);
  auto it = std::find(t.header.begin(), t.header.end(), target);
  if (it == t.header.end()) throw DataError("target '" + target + "' not found in " + path);
  if (t.rows.size() < 2) throw DataError(path + ": need at least 2 data rows");
  const std::size_t target_col = static_cast<std::size_t>(it - t.header.begin());

  for (const auto& row : t.rows) {
    if (options.na_tokens.count(row[target_col])) {
      throw DataError("target '" + target + "' has missing values");
    }
  }

  std::vector<Column> features;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (j == target_col) continue;
    features.push_back(build_column(t, j, options, std::nullopt));
  }
  // A classification hint keeps numeric-looking labels as text.
  std::optional<ColumnKind> target_kind;
  if (task_hint && is_classification(*task_hint)) target_kind = ColumnKind::Categorical;
  Column target_column = build_column(t, target_col, options, target_kind);
  return Dataset::with_target(std::move(features), target_column, task_hint);
}

Dataset load_csv_features(const std::string& path, const FeatureSchema& schema,
                          const CsvOptions& options) {
  RawTable t = read_table(path);
  std::vector<Column> features;
  for (std::size_t k = 0; k < schema.names.size(); ++k) {
    auto it = std::find(t.header.begin(), t.header.end(), schema.names[k]);
    if (it == t.header.end()) {
      throw DataError("feature '" + schema.names[k] + "' not found in " + path);
    }
    features.push_back(build_column(t, static_cast<std::size_t>(it - t.header.begin()), options,
                                    schema.kinds[k]));
  }
  if (features.empty()) {
    Dataset d;
    return d;
  }
  return Dataset::features_only(std::move(features));
}

SplitPair split_holdout(const Dataset& d, double valid_fraction, std::uint64_t seed,
                        bool stratify) {
  if (!(valid_fraction > 0.0 && valid_fraction < 1.0)) {
    throw std::invalid_argument("valid_fraction must lie in (0, 1)");
  }
  const std::size_t n = d.n_rows();
  if (n < 5) throw DataError("holdout split needs at least 5 rows");
  const auto n_valid = static_cast<std::size_t>(std::llround(valid_fraction * static_cast<double>(n)));
  if (n_valid == 0 || n_valid >= n) {
    throw DataError("holdout split would leave an empty part");
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> valid;

  const bool stratified = stratify && d.has_target() && is_classification(d.task());
  if (!stratified) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    valid.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_valid));
  } else {
    const auto& t = d.target();
    std::vector<std::vector<std::size_t>> by_class(t.classes.size());
    for (std::size_t i = 0; i < n; ++i) by_class[t.codes[i]].push_back(i);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      if (by_class[c].size() == 1) {
        throw DataError("class '" + t.classes[c] + "' has a single row; cannot stratify");
      }
    }
    // Largest-remainder apportionment of n_valid across classes.
    std::vector<std::size_t> quota(by_class.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      double share = valid_fraction * static_cast<double>(by_class[c].size());
      quota[c] = static_cast<std::size_t>(std::floor(share));
      assigned += quota[c];
      remainders.emplace_back(share - std::floor(share), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < n_valid && k < remainders.size(); ++k) {
      ++quota[remainders[k].second];
      ++assigned;
    }
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      auto rows = by_class[c];
      std::shuffle(rows.begin(), rows.end(), rng);
      valid.insert(valid.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    }
  }

  std::sort(valid.begin(), valid.end());
  std::vector<std::size_t> train;
  train.reserve(n - valid.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (k < valid.size() && valid[k] == i) {
      ++k;
    } else {
      train.push_back(i);
    }
  }

  SplitPair out;
  out.seed = seed;
  out.train = d.subset(train);
  out.valid = d.subset(valid);
  out.train_rows = std::move(train);
  out.valid_rows = std::move(valid);
  return out;
}

int majority_class(const Dataset& train) {
  const auto& t = train.target();
  if (!is_classification(t.task)) throw DataError("majority class needs a classification task");
  std::vector<std::size_t> counts(t.classes.size(), 0);
  for (int c : t.codes) ++counts[c];
  // classes are sorted, so the first maximum is the lexicographically smallest
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

double majority_baseline(const Dataset& train, const Dataset& test) {
  const auto& tt = test.target();
  if (!is_classification(tt.task)) throw DataError("majority baseline needs a classification task");
  if (tt.codes.empty()) throw DataError("majority baseline: empty test set");
  const std::string& predicted = train.target().classes[majority_class(train)];
  std::size_t wrong = 0;
  for (int c : tt.codes) wrong += tt.classes[c] != predicted;
  return static_cast<double>(wrong) / static_cast<double>(tt.codes.size());
}

}  // namespace autoboost
