#pragma once

#include <cmath>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "ptl/errors.hpp"
#include "ptl/quadrature.hpp"

namespace ptl {

/// Scalar constants of the model at margin kappa.
struct Constants {
  double kappa;
  double p;          ///< P[|Z| <= kappa]
  double alpha_c;    ///< -log 2 / log p
  double mu2;        ///< E[Z^2 ; |Z| <= kappa] / p
  double beta;       ///< -(sqrt(alpha_c)/2)(1 - mu2), inside (-1/2, 0)
  double zstar_mean; ///< (1/4) log(1 - 4 beta^2)
  double zstar_var;  ///< -(1/2) log(1 - 4 beta^2); normal laws are (mean, variance) throughout
};

/// P[|Z| <= kappa] for standard normal Z.
double gaussian_mass(double kappa);

/// log P[|Z| <= kappa], accurate when the mass is close to 1.
double log_gaussian_mass(double kappa);

/// -log 2 / log p. Infinite once p rounds to 1.
double critical_alpha(double kappa);

/// Truncated second moment E[Z^2 1{|Z| <= kappa}] / p, by adaptive quadrature.
double mu2(double kappa, const QuadratureConfig& cfg = {});

/// Throws NumericalInstability if the result leaves (-1/2, 0).
double beta(double kappa, const QuadratureConfig& cfg = {});

/// Pair probability q(gamma): both |sqrt(g) Z1 +- sqrt(1-g) Z2| <= kappa.
/// For fixed Z1 = z the admissible Z2 form the interval
/// |Z2| <= (kappa - sqrt(g)|z|) / sqrt(1-g), so one outer integral suffices.
double pair_prob(double gamma, double kappa, const QuadratureConfig& cfg = {});

/// q''(1/2) by central differences at step h with one Richardson step.
double pair_prob_curvature(double kappa, double h = 1e-3, const QuadratureConfig& cfg = {});

/// Natural-log binary entropy with 0 log 0 = 0.
double binary_entropy(double x);

/// F(gamma) = H(gamma) + alpha_c log q(gamma). Extended continuously to the
/// endpoints, where F(0) = F(1) = alpha_c log p = -log 2.
double rate_function(double gamma, double kappa, const QuadratureConfig& cfg = {});

struct BinomBounds {
  double log_upper_bound;                  ///< log of sqrt(n/(k(n-k))) exp(n H(k/n))
  std::optional<double> log_central_approx;///< log of 2^n sqrt(2/(pi n)) exp(-t^2/(2n)), t = 2k - n
  double log_error_band;                   ///< central approximation holds within exp(+-n^{-1/2})

  double upper_bound() const { return std::exp(log_upper_bound); }
};

/// Entropy bound on C(n, k) and, near the centre, its Gaussian approximation.
/// Values are returned in log space so that large n does not overflow.
BinomBounds binom_bounds(long long n, long long k);

struct ZStarParams {
  double mean;
  double variance;
};

/// Parameters of the log-normal fluctuation variable Z*.
ZStarParams zstar_params(double beta);

Constants constants(double kappa, const QuadratureConfig& cfg = {});

/// KL(N(0, sigma1) || N(0, sigma2)) =
///   (log det(sigma2 sigma1^{-1}) - d + tr(sigma2^{-1} sigma1)) / 2.
/// Both arguments must be symmetric positive definite of equal size.
template <typename D1, typename D2>
double gaussian_kl(const Eigen::MatrixBase<D1>& sigma1, const Eigen::MatrixBase<D2>& sigma2) {
  using Mat = Eigen::Matrix<typename D1::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index d = sigma1.rows();
  if (sigma1.cols() != d || sigma2.rows() != d || sigma2.cols() != d || d == 0)
    throw DomainError("gaussian_kl: covariances must be square and of equal size");
  const Mat s1 = sigma1;
  const Mat s2 = sigma2;
  const double scale = std::max(s1.cwiseAbs().maxCoeff(), s2.cwiseAbs().maxCoeff());
  if (!((s1 - s1.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale) ||
      !((s2 - s2.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale))
    throw DomainError("gaussian_kl: covariance not symmetric");
  Eigen::LLT<Mat> llt1(s1);
  Eigen::LLT<Mat> llt2(s2);
  if (llt1.info() != Eigen::Success || llt2.info() != Eigen::Success)
    throw DomainError("gaussian_kl: covariance not positive definite");
  const auto logdet = [](const Eigen::LLT<Mat>& llt) {
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  };
  const double trace = llt2.solve(s1).trace();
  const double kl = 0.5 * (logdet(llt2) - logdet(llt1) - static_cast<double>(d) + trace);
  return kl < 0.0 ? 0.0 : kl;
}

/// Pinsker: TV <= sqrt(KL / 2).
inline double tv_bound(double kl) { return std::sqrt(0.5 * kl); }

}  // namespace ptl
