#include "ptl/special_fn.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ptl {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

void check_kappa(double kappa) {
  if (!std::isfinite(kappa) || !(kappa > 0.0))
    throw DomainError("kappa must be positive and finite, got " + std::to_string(kappa));
}

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

}  // namespace

double gaussian_mass(double kappa) {
  check_kappa(kappa);
  return std::erf(kappa * kInvSqrt2);
}

double log_gaussian_mass(double kappa) {
  check_kappa(kappa);
  if (kappa < 1.0) return std::log(std::erf(kappa * kInvSqrt2));
  return std::log1p(-std::erfc(kappa * kInvSqrt2));
}

double critical_alpha(double kappa) {
  const double log_p = log_gaussian_mass(kappa);
  if (log_p == 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(2.0) / log_p;
}

double mu2(double kappa, const QuadratureConfig& cfg) {
  check_kappa(kappa);
  const double second =
      2.0 * integrate([](double z) { return z * z * normal_pdf(z); }, 0.0, kappa, cfg);
  return second / gaussian_mass(kappa);
}

double beta(double kappa, const QuadratureConfig& cfg) {
  const double b = -0.5 * std::sqrt(critical_alpha(kappa)) * (1.0 - mu2(kappa, cfg));
  if (!(b > -0.5 && b < 0.0))
    throw NumericalInstability("beta(" + std::to_string(kappa) + ") = " + std::to_string(b) +
                               " outside (-1/2, 0)");
  return b;
}

double pair_prob(double gamma, double kappa, const QuadratureConfig& cfg) {
  check_kappa(kappa);
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw DomainError("pair_prob: gamma must lie in [0, 1], got " + std::to_string(gamma));
  if (gamma == 0.0 || gamma == 1.0) return gaussian_mass(kappa);
  const double a = std::sqrt(gamma);
  const double b = std::sqrt(1.0 - gamma);
  const auto inner = [&](double z) {
    return normal_pdf(z) * std::erf((kappa - a * z) / b * kInvSqrt2);
  };
  return 2.0 * integrate(inner, 0.0, kappa / a, cfg);
}

double pair_prob_curvature(double kappa, double h, const QuadratureConfig& cfg) {
  const double centre = pair_prob(0.5, kappa, cfg);
  const auto second_diff = [&](double step) {
    return (pair_prob(0.5 + step, kappa, cfg) - 2.0 * centre + pair_prob(0.5 - step, kappa, cfg)) /
           (step * step);
  };
  const double fine = second_diff(h);
  const double coarse = second_diff(2.0 * h);
  return (4.0 * fine - coarse) / 3.0;
}

double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log(x) - (1.0 - x) * std::log1p(-x);
}

double rate_function(double gamma, double kappa, const QuadratureConfig& cfg) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw DomainError("rate_function: gamma must lie in [0, 1]");
  const double alpha = critical_alpha(kappa);
  if (gamma == 0.0 || gamma == 1.0) return alpha * log_gaussian_mass(kappa);
  return binary_entropy(gamma) + alpha * std::log(pair_prob(gamma, kappa, cfg));
}

BinomBounds binom_bounds(long long n, long long k) {
  if (n < 2 || k < 1 || k > n - 1)
    throw DomainError("binom_bounds: need 1 <= k <= n-1, got n=" + std::to_string(n) +
                      ", k=" + std::to_string(k));
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  BinomBounds out{};
  out.log_upper_bound = 0.5 * std::log(nd / (kd * (nd - kd))) + nd * binary_entropy(kd / nd);
  out.log_error_band = 1.0 / std::sqrt(nd);
  const double t = 2.0 * kd - nd;
  if (std::abs(t) <= std::sqrt(nd) * std::log(nd)) {
    out.log_central_approx =
        nd * std::log(2.0) + 0.5 * std::log(2.0 / (M_PI * nd)) - t * t / (2.0 * nd);
  }
  return out;
}

ZStarParams zstar_params(double beta) {
  const double four_b2 = 4.0 * beta * beta;
  if (!std::isfinite(beta) || !(four_b2 < 1.0))
    throw DomainError("zstar_params: need 4 beta^2 < 1, got beta=" + std::to_string(beta));
  const double l = std::log1p(-four_b2);
  return {0.25 * l, -0.5 * l};
}

Constants constants(double kappa, const QuadratureConfig& cfg) {
  Constants c{};
  c.kappa = kappa;
  c.p = gaussian_mass(kappa);
  c.alpha_c = critical_alpha(kappa);
  c.mu2 = mu2(kappa, cfg);
  c.beta = beta(kappa, cfg);
  const auto z = zstar_params(c.beta);
  c.zstar_mean = z.mean;
  c.zstar_var = z.variance;
  return c;
}

}  // namespace ptl
