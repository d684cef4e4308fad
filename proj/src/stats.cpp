#include "ptl/stats.hpp"

#include <algorithm>
#include <cmath>

#include "ptl/errors.hpp"

namespace ptl {

double normal_cdf(double x, double mean, double variance) {
  if (variance <= 0.0) return x >= mean ? 1.0 : 0.0;
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

void RunningMoments::push(double x) {
  count += 1.0;
  const double delta = x - mean;
  mean += delta / count;
  m2 += delta * (x - mean);
}

RunningMoments& RunningMoments::merge(const RunningMoments& other) {
  if (other.count == 0.0) return *this;
  if (count == 0.0) return *this = other;
  const double total = count + other.count;
  const double delta = other.mean - mean;
  mean += delta * other.count / total;
  m2 += other.m2 + delta * delta * count * other.count / total;
  count = total;
  return *this;
}

double RunningMoments::variance() const { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }

double RunningMoments::se_mean() const { return count > 0.0 ? std::sqrt(variance() / count) : 0.0; }

SampleSummary summarize(std::span<const double> xs) {
  if (xs.size() < 2) throw SampleSizeError("summarize needs at least two samples");
  RunningMoments acc;
  for (double x : xs) acc.push(x);
  const double n = static_cast<double>(xs.size());
  double m4 = 0.0;
  for (double x : xs) m4 += std::pow(x - acc.mean, 4);
  m4 /= n;
  const double var = acc.variance();
  const double se_var = std::sqrt(std::max(0.0, (m4 - var * var * (n - 3.0) / (n - 1.0)) / n));
  return {acc.mean, var, acc.se_mean(), se_var};
}

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw SampleSizeError("ks_statistic on empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < xs.size()) {
    std::size_t j = i;
    while (j < xs.size() && xs[j] == xs[i]) ++j;
    const double f = cdf(xs[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(j) / n - f)});
    i = j;
  }
  return d;
}

double sample_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw SampleSizeError("correlation needs paired samples");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double binomial_band(double p, std::size_t trials, double z) {
  return z * std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

}  // namespace ptl
