#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ptl {

double normal_cdf(double x, double mean = 0.0, double variance = 1.0);

// Mergeable mean/variance accumulator (Chan et al. pairwise update).
struct RunningMoments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x);
  RunningMoments& merge(const RunningMoments& other);

  double variance() const;  // unbiased
  double se_mean() const;
};

struct SampleSummary {
  double mean;
  double variance;
  double se_mean;
  double se_variance;  // plug-in estimate from the fourth central moment
};

SampleSummary summarize(std::span<const double> xs);

// Sup-distance between the empirical CDF of `xs` and a continuous CDF.
// Ties are handled by comparing the CDF with both one-sided limits.
double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf);

double sample_correlation(std::span<const double> x, std::span<const double> y);

// Half-width of the normal-approximation binomial band around probability p
// for `trials` Bernoulli draws at two-sided level given by z.
double binomial_band(double p, std::size_t trials, double z);

}  // namespace ptl
