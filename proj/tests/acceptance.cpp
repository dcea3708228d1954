// Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "autoboost/benchmark.hpp"
#include "autoboost/gp.hpp"
#include "autoboost/pipeline.hpp"
#include "autoboost/smbo.hpp"
#include "autoboost/threshold.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace autoboost;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double sphere(const Eigen::VectorXd& u) { return (u.array() - 0.5).square().sum(); }

Outcome losses() {
  double worst = 0.0;
  for (const auto& c : oracle::check_losses(20, 1)) worst = std::max(worst, c.worst);
  return {worst < 1e-5, fmt("max relative error %.2e", worst)};
}

Outcome depth_one_splits() {
  const int bad = oracle::depth1_mismatches(50, 1);
  return {bad == 0, fmt("%d of 50 datasets disagree", bad)};
}

Outcome impact_encoding() {
  const int bad = oracle::impact_mismatches(50, 1);

  const Dataset d = testing::separable_binary(200, 3, 0.1);
  const encoding::EncoderModel enc = encoding::fit_encoders(d, 10, encoding::Strategy::Impact);
  const Dataset e = encoding::transform(enc, d);
  int bad_rows = 0;
  for (const auto& ce : enc.columns) {
    if (ce.strategy != encoding::Strategy::Dummy) continue;
    const auto names = ce.output_names();
    for (std::size_t i = 0; i < e.n_rows(); ++i) {
      double s = 0.0;
      for (const auto& c : e.features()) {
        if (std::find(names.begin(), names.end(), c.name) != names.end()) s += c.numeric[i];
      }
      bad_rows += s != 1.0;
    }
  }

  const Dataset small = Dataset::with_target({Column::categorical_column("x", {"a", "a", "b", "b", "b"})},
                                             Column::numeric_column("y", {1, 2, 3, 4, 10}));
  const auto senc = encoding::fit_encoders(small, 2, encoding::Strategy::Impact, 1.0);
  const double fallback =
      encoding::transform(senc, Dataset::features_only({Column::categorical_column("x", {"zzz"})})).feature(0).numeric[0];
  const bool prior_ok = std::abs(fallback - 4.0) <= 1e-12;
  return {bad == 0 && bad_rows == 0 && prior_ok,
          fmt("%d group-by mismatches, %d dummy rows off 1, unseen level -> %.6g (prior 4)", bad, bad_rows, fallback)};
}

Outcome surrogate() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd X(10, 3);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = u(rng);
  Eigen::VectorXd y(10);
  for (Eigen::Index i = 0; i < 10; ++i) y(i) = std::sin(3.0 * X(i, 0)) + X.row(i).squaredNorm() + 5.0;
  smbo::GpOptions o;
  o.fixed_noise = 1e-8;
  const auto gp = smbo::GaussianProcess::fit(X, y, o);
  const double err = (gp.posterior(X).first - y).cwiseAbs().maxCoeff();

  const double ei = smbo::expected_improvement(0.0, 1.0, 0.0);
  int negative = 0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd q = Eigen::VectorXd::NullaryExpr(3, [&] { return u(rng); });
    negative += !(smbo::expected_improvement(gp, q, y.minCoeff()) >= 0.0);
  }
  return {err < 1e-3 && std::abs(ei - 0.398942) <= 1e-6 && negative == 0,
          fmt("interpolation error %.2e, EI(best, 1) = %.7f, %d negative EI values", err, ei, negative)};
}

Outcome smbo_vs_random() {
  const smbo::ParamSpace s = smbo::ParamSpace::unit(8);
  std::vector<double> tuned, random;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    tuned.push_back(smbo::tune(sphere, s, 40, 1e9, 16, seed).best().value);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 40; ++i) best = std::min(best, sphere(Eigen::VectorXd::NullaryExpr(8, [&] { return unit(rng); })));
    random.push_back(best);
  }
  const double a = median(tuned), b = median(random);
  return {a < b, fmt("median incumbent %.4f vs random search %.4f", a, b)};
}

Outcome decode_bounds() {
  const smbo::ParamSpace s = smbo::ParamSpace::simple();
  int bad = 0;
  for (int mask = 0; mask < 256; ++mask) {
    Eigen::VectorXd u(8);
    for (int j = 0; j < 8; ++j) u(j) = (mask >> j) & 1;
    const auto c = smbo::decode_config(u, s);
    bad += c.eta != (u(0) ? 0.2 : 0.01);
    bad += c.gamma != (u(1) ? std::ldexp(1.0, 6) : std::ldexp(1.0, -7));
    bad += c.max_depth != (u(2) ? 20 : 3);
    bad += c.lambda != (u(5) ? std::ldexp(1.0, 10) : std::ldexp(1.0, -10));
    bad += c.alpha != (u(6) ? std::ldexp(1.0, 10) : std::ldexp(1.0, -10));
  }
  std::vector<int> depths;
  for (int k = 0; k <= 1000; ++k) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(8);
    u(2) = k / 1000.0;
    depths.push_back(smbo::decode_config(u, s).max_depth);
  }
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  const bool all_depths = depths.size() == 18 && depths.front() == 3 && depths.back() == 20;
  return {bad == 0 && all_depths, fmt("%d corner mismatches, %zu distinct depths", bad, depths.size())};
}

Outcome thresholds() {
  using namespace threshold;
  const LabelMeasure m = mmce_measure();
  std::mt19937_64 rng(7);
  int worse = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto b = oracle::random_scores(40, 2, rng);
    const Eigen::VectorXd pos = b.prob.col(1);
    const std::vector<double> p(pos.data(), pos.data() + pos.size());
    worse += optimize_binary(p, b.truth, m).value > m(apply_thresholds(b.prob, ThresholdVector::binary(0.5)), b.truth);

    const auto c = oracle::random_scores(40, 3, rng);
    GsaOptions o;
    o.seed = static_cast<std::uint64_t>(trial + 1);
    worse += optimize_multiclass_gsa(c.prob, c.truth, m, o).value >
             m(apply_thresholds(c.prob, ThresholdVector::uniform(3)), c.truth);
  }
  int grid_misses = 0, no_gain = 0;
  double worst_gap = -1.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = oracle::underscored_three_class(300, seed);
    const Optimized r = optimize_multiclass_gsa(s.prob, s.truth, m);
    const auto grid = oracle::simplex_grid_mmce(s.prob, s.truth, 50);
    grid_misses += r.value > grid.value + grid.cell_tolerance;
    no_gain += !(r.value < m(apply_thresholds(s.prob, ThresholdVector::uniform(3)), s.truth));
    worst_gap = std::max(worst_gap, r.value - grid.value);
  }
  return {worse == 0 && grid_misses == 0 && no_gain == 0,
          fmt("%d worse than default, %d of 10 outside one grid cell (worst gap %.4f), %d without gain over argmax",
              worse, grid_misses, worst_gap, no_gain)};
}

Outcome end_to_end() {
  const Dataset train = testing::separable_binary(500, 101);
  const Dataset test = testing::separable_binary(1000, 202);
  AutoConfig cfg;
  cfg.budget = 20;
  cfg.deadline = 120.0;
  const PipelineModel a = autogbt_fit(train, cfg);
  const PipelineModel b = autogbt_fit(train, cfg);
  const Predictions pa = autogbt_predict(a, test), pb = autogbt_predict(b, test);
  const double error = mmce(pa.codes, test.target().codes);
  const double baseline = majority_baseline(train, test);
  const bool same = pa.codes == pb.codes && pa.probabilities == pb.probabilities;
  return {error <= 0.05 && error < baseline && same,
          fmt("test mmce %.4f, majority baseline %.4f, repeat fit %s", error, baseline, same ? "identical" : "differs")};
}

Outcome bootstrap() {
  std::vector<double> runs(24, 1.0);
  runs.push_back(0.0);
  const double med = bootstrap_aggregate(runs, 100000, 4, 1);
  const auto reduced = bootstrap_reduced(runs, 100000, 4, 1);
  const double p = static_cast<double>(std::count(reduced.begin(), reduced.end(), 0.0)) / 100000.0;
  const double exact = oracle::prob_min_hits(25, 1, 4);
  return {med == 1.0 && std::abs(p - exact) <= 0.01,
          fmt("median %.3f, P(min=0) %.4f vs exact %.4f", med, p, exact)};
}

Outcome bundle_roundtrip() {
  AutoConfig cfg;
  cfg.budget = 6;
  cfg.n_init = 4;
  const PipelineModel p = autogbt_fit(testing::separable_binary(300, 5), cfg);
  const std::string path = testing::temp_path("acceptance_bundle.json");
  save(p, path);
  const PipelineModel back = load(path);
  const Dataset rows = testing::prediction_rows(100, 6);
  const Predictions a = autogbt_predict(p, rows), b = autogbt_predict(back, rows);
  const bool identical = a.codes == b.codes && a.probabilities == b.probabilities && a.labels == b.labels;

  const std::string text = to_bundle(p);
  auto kind = [](const std::string& t) {
    try {
      from_bundle(t);
    } catch (const BundleError& e) {
      return e.kind() == BundleError::Kind::Corrupt ? 1 : 2;
    }
    return 0;
  };
  std::string tampered = text;
  const auto at = tampered.find("\"threshold\"");
  const auto digit = tampered.find_first_of("0123456789", at);
  tampered[digit] = tampered[digit] == '9' ? '8' : static_cast<char>(tampered[digit] + 1);
  std::string future = text;
  const auto v = future.find("\"version\"");
  const auto vd = future.find_first_of("0123456789", v);
  future.replace(vd, 1, std::to_string(kBundleFormatVersion + 1));
  const int k_trunc = kind(text.substr(0, text.size() - 40)), k_tamper = kind(tampered), k_future = kind(future);
  return {identical && k_trunc == 1 && k_tamper == 1 && k_future == 2,
          fmt("predictions %s; truncated/tampered/newer -> %s/%s/%s", identical ? "bit-identical" : "differ",
              k_trunc == 1 ? "checksum" : "?", k_tamper == 1 ? "checksum" : "?", k_future == 2 ? "version" : "?")};
}

struct Criterion {
  int id;
  double limit;  // seconds, 0 = none
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, 1.0, losses},          {2, 5.0, depth_one_splits}, {3, 1.0, impact_encoding},
      {4, 5.0, surrogate},       {5, 30.0, smbo_vs_random},  {6, 0.0, decode_bounds},
      {7, 30.0, thresholds},     {8, 120.0, end_to_end},     {9, 2.0, bootstrap},
      {10, 0.0, bundle_roundtrip},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit == 0.0 || secs < c.limit;
    const bool pass = o.ok && in_time;
    failed += !pass;
    std::printf("criterion %2d: %s  %s; %.2f s%s\n", c.id, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                in_time ? "" : fmt(" (limit %.0f s)", c.limit).c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
