#include "autoboost/smbo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "autoboost/csv.hpp"

namespace autoboost::smbo {

ParamSpace ParamSpace::simple() {
  return {{
      {"eta", 0.01, 0.2, false, false},
      {"gamma", -7.0, 6.0, false, true},
      {"max_depth", 3.0, 20.0, true, false},
      {"colsample_bytree", 0.5, 1.0, false, false},
      {"colsample_bylevel", 0.5, 1.0, false, false},
      {"lambda", -10.0, 10.0, false, true},
      {"alpha", -10.0, 10.0, false, true},
      {"subsample", 0.5, 1.0, false, false},
  }};
}

ParamSpace ParamSpace::unit(int d) {
  ParamSpace s;
  for (int i = 0; i < d; ++i) s.params.push_back({"x" + std::to_string(i), 0.0, 1.0, false, false});
  return s;
}

Eigen::VectorXd decode(const Eigen::VectorXd& point, const ParamSpace& space) {
  if (point.size() != space.dim()) throw std::invalid_argument("decode: dimension mismatch");
  Eigen::VectorXd out(point.size());
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    const double u = point(i);
    if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("decode: coordinate outside [0,1]");
    const auto& p = space.params[static_cast<std::size_t>(i)];
    double v = std::lerp(p.lower, p.upper, u);
    if (p.log2) v = std::exp2(v);
    if (p.integer) v = std::round(v);
    out(i) = v;
  }
  return out;
}

Eigen::VectorXd encode(const Eigen::VectorXd& values, const ParamSpace& space) {
  if (values.size() != space.dim()) throw std::invalid_argument("encode: dimension mismatch");
  Eigen::VectorXd out(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const auto& p = space.params[static_cast<std::size_t>(i)];
    const double raw = p.log2 ? std::log2(values(i)) : values(i);
    out(i) = std::clamp((raw - p.lower) / (p.upper - p.lower), 0.0, 1.0);
  }
  return out;
}

namespace {

double* config_field(gbt::GBTConfig& cfg, const std::string& name) {
  if (name == "eta") return &cfg.eta;
  if (name == "gamma") return &cfg.gamma;
  if (name == "colsample_bytree") return &cfg.colsample_bytree;
  if (name == "colsample_bylevel") return &cfg.colsample_bylevel;
  if (name == "lambda") return &cfg.lambda;
  if (name == "alpha") return &cfg.alpha;
  if (name == "subsample") return &cfg.subsample;
  return nullptr;
}

}  // namespace

gbt::GBTConfig decode_config(const Eigen::VectorXd& point, const ParamSpace& space, gbt::GBTConfig base) {
  const Eigen::VectorXd values = decode(point, space);
  for (std::size_t i = 0; i < space.params.size(); ++i) {
    const auto& name = space.params[i].name;
    if (name == "max_depth") {
      base.max_depth = static_cast<int>(values(static_cast<Eigen::Index>(i)));
    } else if (double* field = config_field(base, name)) {
      *field = values(static_cast<Eigen::Index>(i));
    } else {
      throw std::invalid_argument("decode_config: unknown parameter " + name);
    }
  }
  return base;
}

Eigen::VectorXd encode_config(const gbt::GBTConfig& cfg, const ParamSpace& space) {
  Eigen::VectorXd values(space.dim());
  gbt::GBTConfig copy = cfg;
  for (std::size_t i = 0; i < space.params.size(); ++i) {
    const auto& name = space.params[i].name;
    if (name == "max_depth") {
      values(static_cast<Eigen::Index>(i)) = cfg.max_depth;
    } else if (double* field = config_field(copy, name)) {
      values(static_cast<Eigen::Index>(i)) = *field;
    } else {
      throw std::invalid_argument("encode_config: unknown parameter " + name);
    }
  }
  return encode(values, space);
}

Eigen::MatrixXd initial_design(const ParamSpace& space, int n_init, std::uint64_t seed) {
  if (n_init < 1) throw std::invalid_argument("initial_design: n_init must be >= 1");
  const Eigen::Index d = space.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd design(n_init, d);
  std::vector<int> strata(static_cast<std::size_t>(n_init));
  for (Eigen::Index j = 0; j < d; ++j) {
    std::iota(strata.begin(), strata.end(), 0);
    std::shuffle(strata.begin(), strata.end(), rng);
    for (int i = 0; i < n_init; ++i) {
      // strictly inside the stratum so that values stay in (0, 1)
      double jitter = unit(rng);
      if (jitter <= 0.0) jitter = 0.5;
      design(i, j) = (strata[static_cast<std::size_t>(i)] + jitter) / n_init;
    }
  }
  return design;
}

double expected_improvement(double mean, double sd, double best) {
  const double diff = best - mean;
  if (sd < 1e-12) return std::max(diff, 0.0);
  const double z = diff / sd;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(diff * cdf + sd * pdf, 0.0);
}

double expected_improvement(const GaussianProcess& gp, const Eigen::VectorXd& point, double best) {
  auto [m, s] = gp.posterior_at(point);
  return expected_improvement(m, s, best);
}

namespace {

constexpr int kCandidates = 1000;
constexpr int kRefinements = 10;
constexpr double kDuplicateTol = 1e-9;
constexpr double kPerturbation = 1e-3;

bool is_duplicate(const Eigen::VectorXd& x, const std::vector<Evaluation>& evaluated) {
  return std::any_of(evaluated.begin(), evaluated.end(), [&](const Evaluation& e) {
    return (e.point - x).lpNorm<Eigen::Infinity>() <= kDuplicateTol;
  });
}

// Coordinate pattern search on EI: a successful move is repeated with a
// doubled step, a sweep without success halves the step.
Eigen::VectorXd refine(const GaussianProcess& gp, Eigen::VectorXd x, double best) {
  constexpr int kMaxEvaluations = 600;
  double ei = expected_improvement(gp, x, best);
  double step = 0.05;
  int evaluations = 0;
  while (step >= 1e-4 && evaluations < kMaxEvaluations) {
    bool improved = false;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      for (double sign : {1.0, -1.0}) {
        double move = step;
        bool moved = false;
        while (evaluations < kMaxEvaluations) {
          Eigen::VectorXd y = x;
          y(k) = std::clamp(y(k) + sign * move, 0.0, 1.0);
          if (y(k) == x(k)) break;
          const double v = expected_improvement(gp, y, best);
          ++evaluations;
          if (!(v > ei)) break;
          ei = v;
          x = std::move(y);
          moved = true;
          move *= 2.0;
        }
        if (moved) {
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return x;
}

}  // namespace

Proposal propose_point(const TuneState& state) {
  if (state.exhausted()) throw std::logic_error("propose_point: evaluation budget exhausted");
  if (state.evaluated.empty()) throw std::logic_error("propose_point: no evaluations yet");
  const Eigen::Index d = state.space.dim();
  const auto n = static_cast<Eigen::Index>(state.evaluated.size());

  std::seed_seq seq{state.seed, static_cast<std::uint64_t>(n), std::uint64_t{0x5eed}};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X.row(i) = state.evaluated[static_cast<std::size_t>(i)].point.transpose();
    y(i) = state.evaluated[static_cast<std::size_t>(i)].value;
  }

  Proposal out;
  std::optional<GaussianProcess> gp;
  if (n >= 2) {
    GpOptions options;
    options.seed = rng();
    options.n_restarts = 2;
    options.warm_start = state.gp;
    gp = GaussianProcess::fit(X, y, options);
    if (gp->degenerate()) gp.reset();
  }

  if (!gp) {
    out.point = Eigen::VectorXd::NullaryExpr(d, [&] { return unit(rng); });
  } else {
    out.gp = gp->hyper();
    const double best = state.best().value;
    Eigen::MatrixXd candidates = Eigen::MatrixXd::NullaryExpr(kCandidates, d, [&] { return unit(rng); });
    auto [mean, sd] = gp->posterior(candidates);
    std::vector<double> ei(static_cast<std::size_t>(kCandidates));
    for (int i = 0; i < kCandidates; ++i) ei[static_cast<std::size_t>(i)] = expected_improvement(mean(i), sd(i), best);

    std::vector<int> order(static_cast<std::size_t>(kCandidates));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return ei[static_cast<std::size_t>(a)] > ei[static_cast<std::size_t>(b)];
    });

    out.point = candidates.row(order.front()).transpose();
    double best_ei = ei[static_cast<std::size_t>(order.front())];
    for (int r = 0; r < kRefinements; ++r) {
      Eigen::VectorXd x = refine(*gp, candidates.row(order[static_cast<std::size_t>(r)]).transpose(), best);
      const double v = expected_improvement(*gp, x, best);
      if (v > best_ei) {
        best_ei = v;
        out.point = std::move(x);
      }
    }
  }

  while (is_duplicate(out.point, state.evaluated)) {
    for (Eigen::Index k = 0; k < d; ++k) {
      const double offset = kPerturbation * (2.0 * unit(rng) - 1.0);
      double v = out.point(k) + offset;
      if (v < 0.0 || v > 1.0) v = out.point(k) - offset;
      out.point(k) = std::clamp(v, 0.0, 1.0);
    }
  }
  return out;
}

namespace {

void refresh(TuneState& state) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& e : state.evaluated) {
    if (std::isfinite(e.objective)) {
      lo = std::min(lo, e.objective);
      hi = std::max(hi, e.objective);
    }
  }
  const bool any_finite = lo <= hi;
  const double range = any_finite && hi > lo ? hi - lo : 1.0;
  for (auto& e : state.evaluated) {
    e.value = std::isfinite(e.objective) ? e.objective : (any_finite ? hi + range : 0.0);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < state.evaluated.size(); ++i) {
    if (state.evaluated[i].value < state.evaluated[best].value) best = i;
  }
  state.incumbent = best;
}

}  // namespace

TuneState tune(const Objective& objective, const ParamSpace& space, int budget, double deadline,
               int n_init, std::uint64_t seed) {
  if (n_init < 1 || budget < n_init) throw std::invalid_argument("tune: need budget >= n_init >= 1");
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  TuneState state;
  state.space = space;
  state.budget = budget;
  state.deadline = deadline;
  state.seed = seed;

  auto evaluate = [&](const Eigen::VectorXd& point) {
    const auto t0 = clock::now();
    Evaluation e;
    e.point = point;
    e.values = decode(point, space);
    e.objective = objective(point);
    e.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    state.evaluated.push_back(std::move(e));
    refresh(state);
  };

  const Eigen::MatrixXd design = initial_design(space, n_init, seed);
  for (int i = 0; i < n_init; ++i) {
    if (i > 0 && elapsed() >= deadline) break;
    evaluate(design.row(i).transpose());
  }
  const bool any_finite = std::any_of(state.evaluated.begin(), state.evaluated.end(),
                                      [](const Evaluation& e) { return std::isfinite(e.objective); });
  if (!any_finite) throw std::runtime_error("tune: every initial evaluation was non-finite");

  while (!state.exhausted() && elapsed() < deadline) {
    Proposal p = propose_point(state);
    if (p.gp) state.gp = p.gp;
    evaluate(p.point);
  }
  return state;
}

void write_history_csv(std::ostream& out, const TuneState& state) {
  csv::Row header{"iteration"};
  for (const auto& p : state.space.params) header.push_back(p.name);
  header.push_back("objective");
  header.push_back("seconds");
  csv::write_row(out, header);
  double total = 0.0;
  for (std::size_t i = 0; i < state.evaluated.size(); ++i) {
    const auto& e = state.evaluated[i];
    total += e.seconds;
    csv::Row row{std::to_string(i + 1)};
    for (Eigen::Index k = 0; k < e.values.size(); ++k) row.push_back(csv::format_double(e.values(k)));
    row.push_back(csv::format_double(e.objective));
    row.push_back(csv::format_double(total));
    csv::write_row(out, row);
  }
}

}  // namespace autoboost::smbo
