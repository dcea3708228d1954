#include "autoboost/gp.hpp"

#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace autoboost::smbo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxNugget = 1e-2;

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const GpHyper& h, double nugget) {
  Eigen::MatrixXd K = matern52_kernel(X, X, h.length_scales, h.signal_var);
  K.diagonal().array() += nugget;
  return K;
}

}  // namespace

double negative_lml(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_std, const GpHyper& hyper,
                    Eigen::VectorXd* gradient) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  Eigen::MatrixXd K = kernel_matrix(X, hyper, hyper.noise_var);
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) return kInf;
  const Eigen::VectorXd alpha = llt.solve(y_std);
  const Eigen::MatrixXd L = llt.matrixL();
  const double log_det = 2.0 * L.diagonal().array().log().sum();
  if (!std::isfinite(log_det)) return kInf;
  const double nll = 0.5 * y_std.dot(alpha) + 0.5 * log_det +
                     0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

  if (gradient) {
    const Eigen::MatrixXd K_inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    const Eigen::MatrixXd W = alpha * alpha.transpose() - K_inv;
    gradient->setZero(d + 2);
    const Eigen::VectorXd inv_len = hyper.length_scales.cwiseInverse();
    const double sqrt5 = std::sqrt(5.0);
    double signal_term = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
      signal_term += W(a, a) * hyper.signal_var;
      for (Eigen::Index b = a + 1; b < n; ++b) {
        const Eigen::VectorXd scaled = (X.row(a) - X.row(b)).transpose().cwiseProduct(inv_len);
        const double r = scaled.norm();
        const double e = std::exp(-sqrt5 * r);
        const double kab = hyper.signal_var * (1.0 + sqrt5 * r + 5.0 * r * r / 3.0) * e;
        signal_term += 2.0 * W(a, b) * kab;
        const double factor = hyper.signal_var * (5.0 / 3.0) * (1.0 + sqrt5 * r) * e;
        for (Eigen::Index k = 0; k < d; ++k) {
          (*gradient)(k) += 2.0 * W(a, b) * factor * scaled(k) * scaled(k);
        }
      }
    }
    (*gradient)(d) = signal_term;
    (*gradient)(d + 1) = W.trace() * hyper.noise_var;
    *gradient *= -0.5;
  }
  return nll;
}

Eigen::VectorXd minimize_bfgs(const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& f,
                              Eigen::VectorXd x0, int max_iter, double grad_tol) {
  const Eigen::Index n = x0.size();
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g(n);
  double fx = f(x, g);
  if (!std::isfinite(fx)) return x;
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;

  for (int it = 0; it < max_iter; ++it) {
    if (g.norm() < grad_tol) break;
    Eigen::VectorXd p = -H * g;
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      H.setIdentity();
      p = -g;
      slope = -g.squaredNorm();
    }
    double step = 1.0;
    Eigen::VectorXd xn(n), gn(n);
    double fn = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      xn = x + step * p;
      fn = f(xn, gn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd yv = gn - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12) {
      if (!scaled) {
        H *= sy / yv.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      H = (I - rho * s * yv.transpose()) * H * (I - rho * yv * s.transpose()) + rho * s * s.transpose();
    }
    const double delta = fx - fn;
    x = xn;
    g = gn;
    fx = fn;
    if (delta < 1e-10 * (1.0 + std::abs(fx))) break;
  }
  return x;
}

void GaussianProcess::factorize(const Eigen::VectorXd& y_std) {
  double nugget = hyper_.noise_var;
  for (;;) {
    llt_.compute(kernel_matrix(X_, hyper_, nugget));
    if (llt_.info() == Eigen::Success) break;
    nugget = std::max(nugget * 10.0, 1e-8);
    if (nugget > kMaxNugget) throw std::runtime_error("gp: kernel matrix is singular");
  }
  hyper_.noise_var = nugget;
  alpha_ = llt_.solve(y_std);
  const Eigen::MatrixXd L = llt_.matrixL();
  lml_ = -(0.5 * y_std.dot(alpha_) + L.diagonal().array().log().sum() +
           0.5 * static_cast<double>(X_.rows()) * std::log(2.0 * std::numbers::pi));
}

namespace {

struct Box {
  Eigen::VectorXd lo, hi;
};

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

GaussianProcess GaussianProcess::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                     const GpOptions& options) {
  if (X.rows() < 2) throw std::invalid_argument("gp: need at least 2 points");
  if (X.rows() != y.size()) throw std::invalid_argument("gp: X/y length mismatch");
  if (!y.allFinite()) throw std::invalid_argument("gp: values must be finite");

  GaussianProcess gp;
  gp.X_ = X;
  const Eigen::Index d = X.cols();
  gp.y_mean_ = y.mean();
  const double sd = std::sqrt((y.array() - gp.y_mean_).square().mean());
  gp.hyper_.length_scales = Eigen::VectorXd::Constant(d, 0.3);
  if (!(sd > 1e-12 * std::max(1.0, std::abs(gp.y_mean_)))) {
    gp.degenerate_ = true;
    gp.y_scale_ = 0.0;
    return gp;
  }
  gp.y_scale_ = sd;
  const Eigen::VectorXd y_std = (y.array() - gp.y_mean_) / sd;

  // Log-parameters (length scales, signal, [noise]) squashed into a box.
  const bool learn_noise = !options.fixed_noise.has_value();
  const Eigen::Index p = d + 1 + (learn_noise ? 1 : 0);
  Box box{Eigen::VectorXd(p), Eigen::VectorXd(p)};
  box.lo.head(d).setConstant(std::log(0.01));
  box.hi.head(d).setConstant(std::log(20.0));
  box.lo(d) = std::log(0.05);
  box.hi(d) = std::log(20.0);
  if (learn_noise) {
    box.lo(d + 1) = std::log(options.noise_floor);
    box.hi(d + 1) = std::log(1.0);
  }
  const double fixed_noise = std::max(options.fixed_noise.value_or(options.noise_floor), options.noise_floor);

  auto to_hyper = [&](const Eigen::VectorXd& z, Eigen::VectorXd* dtheta_dz) {
    GpHyper h;
    Eigen::VectorXd theta(p);
    if (dtheta_dz) dtheta_dz->resize(p);
    for (Eigen::Index i = 0; i < p; ++i) {
      const double s = logistic(z(i));
      theta(i) = box.lo(i) + (box.hi(i) - box.lo(i)) * s;
      if (dtheta_dz) (*dtheta_dz)(i) = (box.hi(i) - box.lo(i)) * s * (1.0 - s);
    }
    h.length_scales = theta.head(d).array().exp().matrix();
    h.signal_var = std::exp(theta(d));
    h.noise_var = learn_noise ? std::exp(theta(d + 1)) : fixed_noise;
    return h;
  };
  auto to_z = [&](const GpHyper& h) {
    Eigen::VectorXd theta(p);
    theta.head(d) = h.length_scales.array().log().matrix();
    theta(d) = std::log(h.signal_var);
    if (learn_noise) theta(d + 1) = std::log(std::max(h.noise_var, options.noise_floor));
    Eigen::VectorXd z(p);
    for (Eigen::Index i = 0; i < p; ++i) {
      const double u = std::clamp((theta(i) - box.lo(i)) / (box.hi(i) - box.lo(i)), 1e-6, 1.0 - 1e-6);
      z(i) = std::log(u / (1.0 - u));
    }
    return z;
  };

  auto objective = [&](const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
    Eigen::VectorXd dtheta;
    const GpHyper h = to_hyper(z, &dtheta);
    Eigen::VectorXd g_full;
    const double v = negative_lml(X, y_std, h, &g_full);
    grad.resize(p);
    if (!std::isfinite(v)) return v;
    grad = g_full.head(p).cwiseProduct(dtheta);
    return v;
  };

  std::vector<Eigen::VectorXd> starts;
  {
    GpHyper h;
    h.length_scales = Eigen::VectorXd::Constant(d, 0.3);
    h.signal_var = 1.0;
    h.noise_var = std::max(1e-4, options.noise_floor);
    starts.push_back(to_z(h));
  }
  if (options.warm_start && options.warm_start->length_scales.size() == d) {
    starts.push_back(to_z(*options.warm_start));
  }
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int r = 0; r < options.n_restarts; ++r) {
    Eigen::VectorXd z(p);
    for (Eigen::Index i = 0; i < p; ++i) {
      const double u = unit(rng);
      z(i) = std::log(u / (1.0 - u));
    }
    starts.push_back(z);
  }

  double best = kInf;
  Eigen::VectorXd best_z = starts.front();
  for (const auto& z0 : starts) {
    Eigen::VectorXd z = minimize_bfgs(objective, z0, options.max_iter);
    Eigen::VectorXd g;
    const double v = objective(z, g);
    if (v < best) {
      best = v;
      best_z = z;
    }
  }
  gp.hyper_ = to_hyper(best_z, nullptr);
  gp.factorize(y_std);
  return gp;
}

GaussianProcess GaussianProcess::with_hyper(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                            const GpHyper& hyper) {
  if (X.rows() < 1 || X.rows() != y.size()) throw std::invalid_argument("gp: bad training data");
  GaussianProcess gp;
  gp.X_ = X;
  gp.hyper_ = hyper;
  gp.y_mean_ = y.mean();
  const double sd = std::sqrt((y.array() - gp.y_mean_).square().mean());
  if (!(sd > 1e-12 * std::max(1.0, std::abs(gp.y_mean_)))) {
    gp.degenerate_ = true;
    gp.y_scale_ = 0.0;
    return gp;
  }
  gp.y_scale_ = sd;
  gp.factorize((y.array() - gp.y_mean_) / sd);
  return gp;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> GaussianProcess::posterior(const Eigen::MatrixXd& Xq) const {
  if (degenerate_) {
    return {Eigen::VectorXd::Constant(Xq.rows(), y_mean_), Eigen::VectorXd::Zero(Xq.rows())};
  }
  const Eigen::MatrixXd Ks = matern52_kernel(X_, Xq, hyper_.length_scales, hyper_.signal_var);
  Eigen::VectorXd mean = Ks.transpose() * alpha_;
  const Eigen::MatrixXd V = llt_.matrixL().solve(Ks);
  Eigen::VectorXd var = (hyper_.signal_var - V.colwise().squaredNorm().array()).max(0.0).matrix();
  mean = (mean.array() * y_scale_ + y_mean_).matrix();
  return {mean, (var.array().sqrt() * y_scale_).matrix()};
}

std::pair<double, double> GaussianProcess::posterior_at(const Eigen::VectorXd& x) const {
  if (degenerate_) return {y_mean_, 0.0};
  const Eigen::Index n = X_.rows();
  const Eigen::VectorXd xs = x.cwiseQuotient(hyper_.length_scales);
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = (X_.row(i).transpose().cwiseQuotient(hyper_.length_scales) - xs).norm();
    k(i) = hyper_.signal_var * matern52(r);
  }
  const double mean = k.dot(alpha_);
  llt_.matrixL().solveInPlace(k);
  const double var = std::max(hyper_.signal_var - k.squaredNorm(), 0.0);
  return {mean * y_scale_ + y_mean_, std::sqrt(var) * y_scale_};
}

}  // namespace autoboost::smbo
