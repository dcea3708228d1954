#ifndef AUTOBOOST_ENCODING_HPP
#define AUTOBOOST_ENCODING_HPP

#include <map>
#include <string>
#include <vector>

#include "autoboost/data.hpp"

namespace autoboost::encoding {

enum class Strategy { Passthrough, Integer, Dummy, Impact };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& name);

/// Fitted transform for one source column.
struct ColumnEncoder {
  std::string name;
  Strategy strategy = Strategy::Passthrough;
  std::vector<std::string> levels;  // sorted; empty for passthrough
  // Integer: one value per level (1..L). Dummy: unused. Impact: `width`
  // values per level, row-major.
  std::vector<double> values;
  std::vector<double> fallback;  // value(s) for unseen levels
  int width = 1;                 // number of output columns

  std::vector<std::string> output_names() const;
};

struct EncoderModel {
  std::vector<ColumnEncoder> columns;
  int k = 10;
  Strategy high_card = Strategy::Impact;
  double smoothing = 1.0;

  std::size_t output_width() const;
};

/// Fits per-column encoders. Categorical columns with fewer than `k`
/// distinct levels are dummy encoded, the rest use `high_card`
/// (Integer or Impact). Impact values are smoothed towards the global prior:
/// (sum of target in level + m * prior) / (n_level + m).
EncoderModel fit_encoders(const Dataset& train, int k = 10, Strategy high_card = Strategy::Impact,
                          double smoothing = 1.0);

/// Applies the encoders; the result has only numeric features and carries
/// the target (if any) through unchanged.
Dataset transform(const EncoderModel& enc, const Dataset& d);

}  // namespace autoboost::encoding

#endif  // AUTOBOOST_ENCODING_HPP
