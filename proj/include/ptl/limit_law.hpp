#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ptl/quadrature.hpp"
#include "ptl/simulator.hpp"
#include "ptl/special_fn.hpp"

namespace ptl {

/// Limiting law of tau - alpha_c n: P[tau - alpha_c n <= k] -> E[exp(-e^{Z*} p^k / 2)].
struct LimitLaw {
  double p;
  double zstar_mean;
  double zstar_var;
  double alpha_c;

  static LimitLaw from_constants(const Constants& c);
  /// beta = 0: Z* is a point mass at 0.
  static LimitLaw degenerate(double kappa);
  void validate() const;
};

/// Gauss-Hermite evaluation, cross-checked against adaptive quadrature.
/// Disagreement above 1e-8 raises NumericalInstability.
double limit_cdf(const LimitLaw& law, double k, const QuadratureConfig& cfg = {});

/// 1 - limit_cdf, without cancellation in the upper tail.
double limit_survival(const LimitLaw& law, double k, const QuadratureConfig& cfg = {});

/// Continuous k with limit_cdf(k) = prob, by bisection on [-200, 200].
double limit_quantile(const LimitLaw& law, double prob, const QuadratureConfig& cfg = {});

/// Smallest integer tau with limit_cdf(tau - shift) >= prob.
long lattice_quantile(const LimitLaw& law, double shift, double prob, const QuadratureConfig& cfg = {});

/// Least-squares slope of log(1 - limit_cdf(k)) over integer k in [k_lo, k_hi].
double upper_tail_slope(const LimitLaw& law, int k_lo = 10, int k_hi = 20,
                        const QuadratureConfig& cfg = {});

/// (1 - survive_prob)^count: every one of `count` independent survivors dies.
double binomial_emptying(std::uint64_t count, double survive_prob);

inline constexpr std::size_t kMinEmpiricalRecords = 100;

struct EmpiricalCdf {
  std::vector<double> values;  ///< sorted tau - shift
  double shift = 0.0;

  std::size_t size() const { return values.size(); }
  /// Fraction of samples <= x.
  double operator()(double x) const;
  /// Smallest sample x with cdf(x) >= 1/2.
  double median() const;
};

EmpiricalCdf empirical_cdf(std::span<const ThresholdRecord> records, double shift);
/// shift = alpha_c n.
EmpiricalCdf empirical_cdf(std::span<const ThresholdRecord> records, const ModelParams& params);

/// Sup over the integer tau lattice of |emp P[tau <= t] - limit_cdf(t - shift)|.
double ks_distance(const EmpiricalCdf& emp, const LimitLaw& law, const QuadratureConfig& cfg = {});

/// Thresholds drawn from the limit law on the lattice tau = k + shift by inverse CDF.
std::vector<ThresholdRecord> sample_from_law(const LimitLaw& law, double shift, std::size_t count,
                                             std::uint64_t seed);

struct LognormalFit {
  double ks;
  std::size_t included;
  std::size_t excluded;  ///< trials with X = 0 at tau_pre
  bool regime_warning;   ///< more than 20% excluded
  std::vector<double> log_ratios;
};

/// KS distance of log(X / 2^n p^tau_pre) over nonempty trials against
/// N(zstar_mean, zstar_var), or against `reference` when given.
LognormalFit lognormal_fit(const ModelParams& params, long tau_pre, std::size_t trials,
                           std::uint64_t seed, unsigned threads = 1,
                           std::optional<ZStarParams> reference = std::nullopt);

struct ThresholdMoments {
  double mean;
  double variance;
  double se_mean;
  double se_variance;
};

/// Mean and variance of tau - shift.
ThresholdMoments threshold_moments(const EmpiricalCdf& emp);

}  // namespace ptl
