#ifndef AUTOBOOST_SMBO_HPP
#define AUTOBOOST_SMBO_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "autoboost/gbt.hpp"
#include "autoboost/gp.hpp"

namespace autoboost::smbo {

struct ParamSpec {
  std::string name;
  double lower = 0.0;  // raw scale (exponent when log2)
  double upper = 1.0;
  bool integer = false;
  bool log2 = false;
};

struct ParamSpace {
  std::vector<ParamSpec> params;

  Eigen::Index dim() const { return static_cast<Eigen::Index>(params.size()); }

  /// The eight-parameter boosting space tuned by default.
  static ParamSpace simple();
  /// d real parameters on [0, 1] with no transform.
  static ParamSpace unit(int d);
};

/// Maps a unit-cube point to parameter values: raw = lower + u (upper - lower),
/// then 2^raw for log2 parameters, then round-half-away for integers.
Eigen::VectorXd decode(const Eigen::VectorXd& point, const ParamSpace& space);

/// Inverse of `decode` (exact on integer grid values and on the bounds).
Eigen::VectorXd encode(const Eigen::VectorXd& values, const ParamSpace& space);

/// Decodes into the tuned fields of `base`, leaving the controls untouched.
gbt::GBTConfig decode_config(const Eigen::VectorXd& point, const ParamSpace& space,
                             gbt::GBTConfig base = {});

Eigen::VectorXd encode_config(const gbt::GBTConfig& cfg, const ParamSpace& space);

/// Latin hypercube: n x d, each column's values occupy the n equal-width strata once.
Eigen::MatrixXd initial_design(const ParamSpace& space, int n_init, std::uint64_t seed);

/// Expected improvement for minimization.
double expected_improvement(double mean, double sd, double best);
double expected_improvement(const GaussianProcess& gp, const Eigen::VectorXd& point, double best);

struct Evaluation {
  Eigen::VectorXd point;   // unit cube
  Eigen::VectorXd values;  // decoded parameter values
  double objective = 0.0;  // as returned (may be non-finite)
  double value = 0.0;      // objective, or a penalty when it was non-finite
  double seconds = 0.0;    // wall time of this evaluation
};

struct TuneState {
  ParamSpace space;
  std::vector<Evaluation> evaluated;
  std::size_t incumbent = 0;
  std::optional<GpHyper> gp;
  int budget = 160;
  double deadline = 3600.0;  // seconds
  std::uint64_t seed = 1;

  const Evaluation& best() const { return evaluated.at(incumbent); }
  bool exhausted() const { return static_cast<int>(evaluated.size()) >= budget; }
};

struct Proposal {
  Eigen::VectorXd point;
  std::optional<GpHyper> gp;  // empty when the surrogate was skipped
};

/// Next point to evaluate: EI maximized over 1000 seeded uniform candidates
/// plus coordinate-wise refinement of the 10 best. Falls back to a uniform
/// point when all observed values are equal. Throws when the budget is spent.
Proposal propose_point(const TuneState& state);

using Objective = std::function<double(const Eigen::VectorXd& point)>;

/// Initial design followed by sequential GP/EI proposals until the budget
/// or the deadline (seconds since start) is reached. At least one point is
/// always evaluated.
TuneState tune(const Objective& objective, const ParamSpace& space, int budget, double deadline,
               int n_init, std::uint64_t seed);

/// CSV: iteration, one column per parameter (decoded values), objective, cumulative seconds.
void write_history_csv(std::ostream& out, const TuneState& state);

}  // namespace autoboost::smbo

#endif  // AUTOBOOST_SMBO_HPP
