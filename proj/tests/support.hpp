// Small helpers shared by the test binaries.
#ifndef AUTOBOOST_TESTS_SUPPORT_HPP
#define AUTOBOOST_TESTS_SUPPORT_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "autoboost/csv.hpp"
#include "autoboost/data.hpp"

namespace testing {

inline std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "autoboost_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

inline std::string write_file(const std::string& name, const std::string& content) {
  const std::string path = temp_path(name);
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

/// Writes a dataset (target last) as CSV with empty missing cells.
inline std::string write_csv(const std::string& name, const autoboost::Dataset& d) {
  const std::string path = temp_path(name);
  std::ofstream out(path, std::ios::binary);
  autoboost::csv::Row header;
  for (const auto& c : d.features()) header.push_back(c.name);
  if (d.has_target()) header.push_back(d.target().name);
  autoboost::csv::write_row(out, header);
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    autoboost::csv::Row row;
    for (const auto& c : d.features()) {
      if (c.is_missing(i)) row.emplace_back();
      else if (c.kind == autoboost::ColumnKind::Numeric) row.push_back(autoboost::csv::format_double(c.numeric[i]));
      else row.push_back(c.levels[i]);
    }
    if (d.has_target()) {
      const auto& t = d.target();
      row.push_back(t.task == autoboost::Task::Regression
                        ? autoboost::csv::format_double(t.values[i])
                        : t.classes[static_cast<std::size_t>(t.codes[i])]);
    }
    autoboost::csv::write_row(out, row);
  }
  return path;
}

/// Separable binary task: the label is the sign of x1. x2 shares that sign
/// and c1 takes levels specific to each class, so a row stays separable
/// unless x1, x2 and c1 are all missing. c2 is noise. Every feature cell
/// goes missing with probability `missing`.
inline autoboost::Dataset separable_binary(std::size_t n, std::uint64_t seed, double missing = 0.05,
                                           double margin = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::vector<std::string> pos_levels{"red", "green"};
  const std::vector<std::string> neg_levels{"blue", "black"};
  const std::vector<std::string> noise_levels{"u", "v", "w", "x"};
  std::vector<double> x1, x2;
  std::vector<std::string> c1, c2, y;
  auto drop = [&] { return unif(rng) < missing; };
  while (y.size() < n) {
    const double a = normal(rng);
    if (std::abs(a) < margin) continue;
    const bool pos = a > 0;
    const double b = a * (1.0 + unif(rng)) + (pos ? 0.5 : -0.5);
    const auto& levels = pos ? pos_levels : neg_levels;
    const std::string l1 = levels[rng() % levels.size()];
    const std::string l2 = noise_levels[rng() % noise_levels.size()];
    x1.push_back(drop() ? std::nan("") : a);
    x2.push_back(drop() ? std::nan("") : b);
    c1.push_back(drop() ? autoboost::kMissingLevel : l1);
    c2.push_back(drop() ? autoboost::kMissingLevel : l2);
    y.push_back(pos ? "yes" : "no");
  }
  std::vector<autoboost::Column> features{
      autoboost::Column::numeric_column("x1", x1), autoboost::Column::numeric_column("x2", x2),
      autoboost::Column::categorical_column("c1", c1), autoboost::Column::categorical_column("c2", c2)};
  return autoboost::Dataset::with_target(std::move(features), autoboost::Column::categorical_column("y", y));
}

/// Feature-only rows in the schema of separable_binary, with levels never
/// seen in training and a share of missing cells.
inline autoboost::Dataset prediction_rows(std::size_t n, std::uint64_t seed, double missing = 0.2) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::vector<std::string> c1_levels{"red", "green", "blue", "black", "purple"};
  const std::vector<std::string> c2_levels{"u", "v", "w", "x", "unseen"};
  std::vector<double> x1, x2;
  std::vector<std::string> c1, c2;
  auto drop = [&] { return unif(rng) < missing; };
  for (std::size_t i = 0; i < n; ++i) {
    x1.push_back(drop() ? std::nan("") : normal(rng));
    x2.push_back(drop() ? std::nan("") : normal(rng));
    c1.push_back(drop() ? autoboost::kMissingLevel : c1_levels[rng() % c1_levels.size()]);
    c2.push_back(drop() ? autoboost::kMissingLevel : c2_levels[rng() % c2_levels.size()]);
  }
  return autoboost::Dataset::features_only(
      {autoboost::Column::numeric_column("x1", x1), autoboost::Column::numeric_column("x2", x2),
       autoboost::Column::categorical_column("c1", c1), autoboost::Column::categorical_column("c2", c2)});
}

}  // namespace testing

#endif  // AUTOBOOST_TESTS_SUPPORT_HPP
