#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>

#include "ptl/quadrature.hpp"
#include "ptl/simulator.hpp"

namespace ptl {

/// log C(n, k): exact integer product for n <= 60, lgamma beyond.
double log_binomial(int n, int k);

/// log(2^n p^m).
double log_first_moment(int n, long m, double kappa);

/// E X = 2^n p^m.
double first_moment(int n, long m, double kappa);

/// P[v_n, v_t both survive m rows] = q((n+t)/(2n))^m.
double pair_survival(int n, int t, long m, double kappa, const QuadratureConfig& cfg = {});

struct OverlapSum {
  double value = 0.0;
  double log_value = -std::numeric_limits<double>::infinity();
  bool approximate = false;  ///< binomials from lgamma (n > 60)
  bool empty_band = false;   ///< no admissible t in the summation range
};

/// E X^2 = sum over t = n (mod 2), |t| <= n of 2^n C(n, (n+t)/2) q((n+t)/(2n))^m.
OverlapSum second_moment(int n, long m, double kappa, const QuadratureConfig& cfg = {});

/// The same sum restricted to ceil(sqrt(n) log n) <= |t| <= n - 1: the
/// expected number of ordered solution pairs with overlap in the forbidden band.
OverlapSum pair_structure_sum(int n, long m, double kappa, const QuadratureConfig& cfg = {});

/// exp(-(log n)^{3/2}), the asymptotic ceiling for pair_structure_sum.
double pair_structure_reference(int n);

/// min(1, 2^n p^t) >= P[S^t nonempty].
double tail_upper_bound(int n, long t, double kappa);

struct MomentConfig {
  int n = 0;
  double kappa = 1.0;
  long tau_pre = 1;  ///< number of rows m
  int order = 3;     ///< K
  double level = 1;  ///< L
  std::optional<double> beta_override;

  /// tau_pre = floor(alpha_c n - eta log n), L = eta log n.
  static MomentConfig make(int n, double kappa, double eta = 0.5, int order = 3);
  void validate() const;
};

struct WeightedMoments {
  double ratio1;        ///< E[X w] / E[X]
  double se1;
  double ratio2;        ///< E[X^2 w^2] / E[X^2]
  double se2;
  double ratio2_sq;     ///< E[X^2 w^2] / (E X)^2
  double se2_sq;
  double mean_x;
  std::size_t trials;
};

/// Monte Carlo of the weighted moments with w = exp(-Y_K 1[Y_K >= -L]);
/// X and Y_K come from the same m rows in every trial.
WeightedMoments weighted_moment_mc(const MomentConfig& cfg, std::size_t trials, std::uint64_t seed,
                                   unsigned threads = 1);

struct Estimate {
  double value;
  double se;
};

struct SolutionMomentsMc {
  Estimate x;
  Estimate x2;
};

SolutionMomentsMc mc_solution_moments(const ModelParams& params, long m, std::size_t trials,
                                      std::uint64_t seed, unsigned threads = 1);

/// Frequency with which v_n and v_t survive m fresh Gaussian rows.
Estimate mc_pair_survival(int n, int t, long m, double kappa, std::size_t trials, std::uint64_t seed,
                          unsigned threads = 1);

/// Frequency of S^t being nonempty.
Estimate mc_nonempty(const ModelParams& params, long t, std::size_t trials, std::uint64_t seed,
                     unsigned threads = 1);

/// Mean number of ordered solution pairs (x1, x2) with |<x1,x2>| in the forbidden band.
Estimate mc_forbidden_pairs(const ModelParams& params, long m, std::size_t trials, std::uint64_t seed,
                            unsigned threads = 1);

}  // namespace ptl
