#include "autoboost/encoding.hpp"

#include <algorithm>
#include <stdexcept>

namespace autoboost::encoding {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Passthrough: return "passthrough";
    case Strategy::Integer: return "integer";
    case Strategy::Dummy: return "dummy";
    case Strategy::Impact: return "impact";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "passthrough") return Strategy::Passthrough;
  if (name == "integer") return Strategy::Integer;
  if (name == "dummy") return Strategy::Dummy;
  if (name == "impact") return Strategy::Impact;
  throw std::invalid_argument("unknown encoding strategy: " + name);
}

std::vector<std::string> ColumnEncoder::output_names() const {
  switch (strategy) {
    case Strategy::Passthrough:
    case Strategy::Integer:
      return {name};
    case Strategy::Dummy: {
      std::vector<std::string> out;
      for (const auto& l : levels) out.push_back(name + "=" + l);
      return out;
    }
    case Strategy::Impact: {
      if (width == 1) return {name};
      std::vector<std::string> out;
      for (int c = 0; c < width; ++c) out.push_back(name + "#" + std::to_string(c));
      return out;
    }
  }
  return {};
}

std::size_t EncoderModel::output_width() const {
  std::size_t w = 0;
  for (const auto& c : columns) w += static_cast<std::size_t>(c.width);
  return w;
}

namespace {

std::size_t level_index(const std::vector<std::string>& levels, const std::string& level) {
  auto it = std::lower_bound(levels.begin(), levels.end(), level);
  if (it == levels.end() || *it != level) return levels.size();
  return static_cast<std::size_t>(it - levels.begin());
}

void fit_impact(ColumnEncoder& enc, const Column& column, const Target& target, double m) {
  const std::size_t L = enc.levels.size();
  const std::size_t n = column.size();
  std::vector<double> level_count(L, 0.0);
  std::vector<std::size_t> row_level(n);
  for (std::size_t i = 0; i < n; ++i) {
    row_level[i] = level_index(enc.levels, column.levels[i]);
    level_count[row_level[i]] += 1.0;
  }

  if (target.task == Task::Regression) {
    enc.width = 1;
    std::vector<double> sums(L, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sums[row_level[i]] += target.values[i];
      total += target.values[i];
    }
    const double prior = total / static_cast<double>(n);
    enc.values.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
      enc.values[l] = (sums[l] + m * prior) / (level_count[l] + m);
    }
    enc.fallback = {prior};
    return;
  }

  const int K = target.n_classes();
  enc.width = K;
  std::vector<double> counts(L * static_cast<std::size_t>(K), 0.0);
  std::vector<double> class_total(static_cast<std::size_t>(K), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(target.codes[i]);
    counts[row_level[i] * static_cast<std::size_t>(K) + c] += 1.0;
    class_total[c] += 1.0;
  }
  enc.fallback.resize(static_cast<std::size_t>(K));
  for (std::size_t c = 0; c < class_total.size(); ++c) {
    enc.fallback[c] = class_total[c] / static_cast<double>(n);
  }
  enc.values.resize(counts.size());
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t c = 0; c < static_cast<std::size_t>(K); ++c) {
      const std::size_t idx = l * static_cast<std::size_t>(K) + c;
      enc.values[idx] = (counts[idx] + m * enc.fallback[c]) / (level_count[l] + m);
    }
  }
}

}  // namespace

EncoderModel fit_encoders(const Dataset& train, int k, Strategy high_card, double smoothing) {
  if (k < 2) throw std::invalid_argument("cardinality threshold k must be >= 2");
  if (high_card != Strategy::Integer && high_card != Strategy::Impact) {
    throw std::invalid_argument("high-cardinality strategy must be integer or impact");
  }
  if (!(smoothing >= 0.0)) throw std::invalid_argument("impact smoothing must be >= 0");
  if (train.n_rows() == 0) throw DataError("cannot fit encoders on an empty dataset");

  EncoderModel model;
  model.k = k;
  model.high_card = high_card;
  model.smoothing = smoothing;

  for (const auto& column : train.features()) {
    ColumnEncoder enc;
    enc.name = column.name;
    if (column.kind == ColumnKind::Numeric) {
      model.columns.push_back(std::move(enc));
      continue;
    }
    enc.levels = column.distinct_levels();
    const auto L = static_cast<int>(enc.levels.size());
    if (L < k) {
      enc.strategy = Strategy::Dummy;
      enc.width = L;
    } else if (high_card == Strategy::Integer) {
      enc.strategy = Strategy::Integer;
      enc.values.resize(enc.levels.size());
      for (std::size_t l = 0; l < enc.levels.size(); ++l) enc.values[l] = static_cast<double>(l + 1);
      enc.fallback = {0.0};
    } else {
      if (!train.has_target()) throw DataError("impact encoding needs a target column");
      enc.strategy = Strategy::Impact;
      fit_impact(enc, column, train.target(), smoothing);
    }
    model.columns.push_back(std::move(enc));
  }
  return model;
}

Dataset transform(const EncoderModel& enc, const Dataset& d) {
  if (d.n_features() != enc.columns.size()) {
    throw DataError("transform: expected " + std::to_string(enc.columns.size()) +
                    " feature columns, got " + std::to_string(d.n_features()));
  }
  const std::size_t n = d.n_rows();
  std::vector<Column> out;
  out.reserve(enc.output_width());

  for (std::size_t j = 0; j < enc.columns.size(); ++j) {
    const auto& ce = enc.columns[j];
    const auto& column = d.feature(j);
    const bool want_numeric = ce.strategy == Strategy::Passthrough;
    if (column.name != ce.name || (column.kind == ColumnKind::Numeric) != want_numeric) {
      throw DataError("transform: schema mismatch at column '" + column.name + "'");
    }
    if (want_numeric) {
      out.push_back(column);
      continue;
    }

    const auto names = ce.output_names();
    std::vector<std::vector<double>> cols(names.size(), std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t l = level_index(ce.levels, column.levels[i]);
      const bool seen = l < ce.levels.size();
      switch (ce.strategy) {
        case Strategy::Integer:
          cols[0][i] = seen ? ce.values[l] : ce.fallback[0];
          break;
        case Strategy::Dummy:
          if (seen) cols[l][i] = 1.0;
          break;
        case Strategy::Impact:
          for (int c = 0; c < ce.width; ++c) {
            cols[static_cast<std::size_t>(c)][i] =
                seen ? ce.values[l * static_cast<std::size_t>(ce.width) + static_cast<std::size_t>(c)]
                     : ce.fallback[static_cast<std::size_t>(c)];
          }
          break;
        case Strategy::Passthrough:
          break;
      }
    }
    for (std::size_t c = 0; c < names.size(); ++c) {
      out.push_back(Column::numeric_column(names[c], std::move(cols[c])));
    }
  }
  return d.with_features(std::move(out));
}

}  // namespace autoboost::encoding
