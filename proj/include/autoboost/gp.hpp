#ifndef AUTOBOOST_GP_HPP
#define AUTOBOOST_GP_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

#include <Eigen/Dense>

namespace autoboost::smbo {

/// Matérn 5/2 correlation as a function of the scaled distance r.
template <typename Scalar>
Scalar matern52(Scalar r) {
  const Scalar s = std::sqrt(Scalar(5)) * r;
  return (Scalar(1) + s + s * s / Scalar(3)) * std::exp(-s);
}

/// Anisotropic Matérn 5/2 cross-covariance between the rows of A and B.
template <typename DerivedA, typename DerivedB, typename DerivedL>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> matern52_kernel(
    const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B,
    const Eigen::MatrixBase<DerivedL>& length_scales, typename DerivedA::Scalar signal_var) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> K(A.rows(), B.rows());
  const auto inv = length_scales.cwiseInverse().transpose().eval();
  for (Eigen::Index j = 0; j < B.rows(); ++j) {
    const auto bj = B.row(j).cwiseProduct(inv).eval();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      const Scalar r = (A.row(i).cwiseProduct(inv) - bj).norm();
      K(i, j) = signal_var * matern52(r);
    }
  }
  return K;
}

/// Kernel hyperparameters on the standardized-value scale.
struct GpHyper {
  Eigen::VectorXd length_scales;
  double signal_var = 1.0;
  double noise_var = 1e-6;
};

struct GpOptions {
  double noise_floor = 1e-8;
  std::optional<double> fixed_noise;  // pin the nugget instead of learning it
  int n_restarts = 3;                 // random starts besides default and warm start
  int max_iter = 100;
  std::uint64_t seed = 0;
  std::optional<GpHyper> warm_start;
};

/// Zero-mean GP regression on standardized values with hyperparameters
/// chosen by maximizing the log marginal likelihood.
class GaussianProcess {
 public:
  /// X is n x d (unit-cube rows), y has n finite values, n >= 2.
  static GaussianProcess fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const GpOptions& options = {});

  /// Same, with fixed hyperparameters.
  static GaussianProcess with_hyper(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const GpHyper& hyper);

  /// Posterior mean and standard deviation of the latent function at the
  /// rows of Xq, on the original value scale.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> posterior(const Eigen::MatrixXd& Xq) const;
  std::pair<double, double> posterior_at(const Eigen::VectorXd& x) const;

  /// True when all training values are equal; the posterior is then the
  /// constant with zero spread.
  bool degenerate() const { return degenerate_; }
  const GpHyper& hyper() const { return hyper_; }
  double log_marginal_likelihood() const { return lml_; }
  double y_mean() const { return y_mean_; }
  double y_scale() const { return y_scale_; }

 private:
  void factorize(const Eigen::VectorXd& y_std);

  Eigen::MatrixXd X_;
  GpHyper hyper_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  double lml_ = 0.0;
  bool degenerate_ = false;
};

/// Negative log marginal likelihood and its gradient with respect to
/// (log length scales, log signal variance, log noise variance).
/// Returns +inf when the kernel matrix is not positive definite.
double negative_lml(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_std, const GpHyper& hyper,
                    Eigen::VectorXd* gradient);

/// Minimizes f with BFGS and a backtracking line search. f returns the
/// value and fills the gradient; non-finite values make the search back off.
Eigen::VectorXd minimize_bfgs(const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& f,
                              Eigen::VectorXd x0, int max_iter, double grad_tol = 1e-6);

}  // namespace autoboost::smbo

#endif  // AUTOBOOST_GP_HPP
