#include "ptl/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ptl/cycle_stats.hpp"
#include "ptl/errors.hpp"
#include "ptl/parallel.hpp"
#include "ptl/rng.hpp"
#include "ptl/special_fn.hpp"
#include "ptl/stats.hpp"

namespace ptl {

namespace {

constexpr int kExactBinomialLimit = 60;

void check_nm(int n, long m) {
  if (n < 1) throw DomainError("n must be positive");
  if (m < 0) throw DomainError("m must be nonnegative");
}

// Neumaier-compensated log-sum-exp.
double log_sum_exp(const std::vector<double>& logs) {
  if (logs.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(logs.begin(), logs.end());
  if (!std::isfinite(top)) return top;
  double sum = 0.0;
  double comp = 0.0;
  for (double l : logs) {
    const double x = std::exp(l - top);
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return top + std::log(sum + comp);
}

OverlapSum overlap_sum(int n, long m, double kappa, int t_lo, int t_hi, const QuadratureConfig& cfg) {
  check_nm(n, m);
  OverlapSum out;
  out.approximate = n > kExactBinomialLimit;
  std::vector<double> logs;
  for (int t = -n; t <= n; t += 2) {
    const int a = std::abs(t);
    if (a < t_lo || a > t_hi) continue;
    const double gamma = static_cast<double>(n + t) / (2.0 * n);
    const double log_q = (t == n || t == -n) ? log_gaussian_mass(kappa) : std::log(pair_prob(gamma, kappa, cfg));
    logs.push_back(n * std::log(2.0) + log_binomial(n, (n + t) / 2) + static_cast<double>(m) * log_q);
  }
  out.empty_band = logs.empty();
  out.log_value = log_sum_exp(logs);
  out.value = std::exp(out.log_value);
  return out;
}

}  // namespace

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  k = std::min(k, n - k);
  if (n <= kExactBinomialLimit) {
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return std::log(static_cast<double>(c));
  }
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_first_moment(int n, long m, double kappa) {
  check_nm(n, m);
  if (m == 0) return n * std::log(2.0);
  return n * std::log(2.0) + static_cast<double>(m) * log_gaussian_mass(kappa);
}

double first_moment(int n, long m, double kappa) { return std::exp(log_first_moment(n, m, kappa)); }

double pair_survival(int n, int t, long m, double kappa, const QuadratureConfig& cfg) {
  check_nm(n, m);
  PlantedKind::pair(t).validate(n);
  if (m == 0) return 1.0;
  const double gamma = static_cast<double>(n + t) / (2.0 * n);
  return std::pow(pair_prob(gamma, kappa, cfg), static_cast<double>(m));
}

OverlapSum second_moment(int n, long m, double kappa, const QuadratureConfig& cfg) {
  return overlap_sum(n, m, kappa, 0, n, cfg);
}

OverlapSum pair_structure_sum(int n, long m, double kappa, const QuadratureConfig& cfg) {
  OverlapSum s = overlap_sum(n, m, kappa, forbidden_band_lower(n), n - 1, cfg);
  if (s.empty_band) {
    s.value = 0.0;
    s.log_value = -std::numeric_limits<double>::infinity();
  }
  return s;
}

double pair_structure_reference(int n) { return std::exp(-std::pow(std::log(static_cast<double>(n)), 1.5)); }

double tail_upper_bound(int n, long t, double kappa) {
  if (t < 0) throw DomainError("tail bound needs t >= 0");
  return std::min(1.0, first_moment(n, t, kappa));
}

// ---------------------------------------------------------------------------

MomentConfig MomentConfig::make(int n, double kappa, double eta, int order) {
  if (!(eta > 0.0)) throw DomainError("eta must be positive");
  MomentConfig cfg;
  cfg.n = n;
  cfg.kappa = kappa;
  const double logn = std::log(static_cast<double>(n));
  cfg.tau_pre = static_cast<long>(std::floor(critical_alpha(kappa) * n - eta * logn));
  cfg.order = order;
  cfg.level = eta * logn;
  cfg.validate();
  return cfg;
}

void MomentConfig::validate() const {
  (void)ModelParams::make(kappa, n);
  if (tau_pre < 1) throw DomainError("tau_pre must be at least 1");
  if (order < 1 || order > kMaxCycleOrder) throw DomainError("weight order K must lie in [1, 3]");
  if (tau_pre < order || n < order) throw DomainError("need m, n >= K for cycle counts");
  if (!(level > 0.0)) throw DomainError("truncation level L must be positive");
}

namespace {

Estimate ratio_of_means(const std::vector<double>& a, const std::vector<double>& b) {
  const double t = static_cast<double>(a.size());
  double sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
  }
  const double ma = sa / t, mb = sb / t;
  const double r = ma / mb;
  double ss = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - r * b[i]) * (a[i] - r * b[i]);
  return {r, std::sqrt(ss / (t * (t - 1.0))) / mb};
}

}  // namespace

WeightedMoments weighted_moment_mc(const MomentConfig& cfg, std::size_t trials, std::uint64_t seed,
                                   unsigned threads) {
  cfg.validate();
  if (trials < 2) throw DomainError("weighted moments need at least two trials");
  const double b = cfg.beta_override ? *cfg.beta_override : beta(cfg.kappa);
  const auto params = ModelParams::make(cfg.kappa, cfg.n);
  struct Sample {
    double x, w;
  };
  auto samples = parallel_trials(trials, threads, seed, [&](std::size_t, std::uint64_t trial_seed) {
    Eigen::MatrixXd rows(cfg.tau_pre, cfg.n);
    SolutionSet s = full_cube(params);
    for (long j = 1; j <= cfg.tau_pre; ++j) {
      const ConstraintVector g = disorder_row(cfg.n, trial_seed, static_cast<std::uint64_t>(j));
      rows.row(j - 1) = g.transpose();
      s.filter(g, cfg.kappa);
    }
    const double y = weighted_count(cycle_counts(rows, cfg.order), b, cfg.order);
    return Sample{static_cast<double>(s.full_count()), std::exp(-(y >= -cfg.level ? y : 0.0))};
  });

  std::vector<double> xw, x, x2w2, x2;
  for (const auto& s : samples) {
    x.push_back(s.x);
    xw.push_back(s.x * s.w);
    x2.push_back(s.x * s.x);
    x2w2.push_back(s.x * s.x * s.w * s.w);
  }
  const auto r1 = ratio_of_means(xw, x);
  const auto r2 = ratio_of_means(x2w2, x2);

  const double t = static_cast<double>(trials);
  double mx = 0, ma = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    mx += x[i];
    ma += x2w2[i];
  }
  mx /= t;
  ma /= t;
  double ss = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const double infl = (x2w2[i] - ma) / (mx * mx) - 2.0 * ma * (x[i] - mx) / (mx * mx * mx);
    ss += infl * infl;
  }
  WeightedMoments out{};
  out.ratio1 = r1.value;
  out.se1 = r1.se;
  out.ratio2 = r2.value;
  out.se2 = r2.se;
  out.ratio2_sq = ma / (mx * mx);
  out.se2_sq = std::sqrt(ss / (t * (t - 1.0)));
  out.mean_x = mx;
  out.trials = trials;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

Estimate mean_estimate(const std::vector<double>& xs) {
  RunningMoments acc;
  for (double v : xs) acc.push(v);
  return {acc.mean, acc.se_mean()};
}

}  // namespace

SolutionMomentsMc mc_solution_moments(const ModelParams& params, long m, std::size_t trials,
                                      std::uint64_t seed, unsigned threads) {
  auto xs = parallel_trials(trials, threads, seed, [&](std::size_t, std::uint64_t s) {
    return static_cast<double>(survivor_count_at(params, m, s));
  });
  std::vector<double> sq(xs.size());
  std::transform(xs.begin(), xs.end(), sq.begin(), [](double v) { return v * v; });
  return {mean_estimate(xs), mean_estimate(sq)};
}

Estimate mc_pair_survival(int n, int t, long m, double kappa, std::size_t trials, std::uint64_t seed,
                          unsigned threads) {
  PlantedKind::pair(t).validate(n);
  const double cut = kappa * std::sqrt(static_cast<double>(n));
  const Eigen::VectorXd vt = planted_direction(n, t);
  auto hits = parallel_trials(trials, threads, seed, [&](std::size_t, std::uint64_t s) {
    for (long j = 1; j <= m; ++j) {
      const ConstraintVector g = disorder_row(n, s, static_cast<std::uint64_t>(j));
      if (std::abs(g.sum()) > cut || std::abs(g.dot(vt)) > cut) return 0.0;
    }
    return 1.0;
  });
  return mean_estimate(hits);
}

Estimate mc_nonempty(const ModelParams& params, long t, std::size_t trials, std::uint64_t seed,
                     unsigned threads) {
  auto hits = parallel_trials(trials, threads, seed, [&](std::size_t, std::uint64_t s) {
    return solution_set_at(params, t, s).is_empty() ? 0.0 : 1.0;
  });
  return mean_estimate(hits);
}

Estimate mc_forbidden_pairs(const ModelParams& params, long m, std::size_t trials, std::uint64_t seed,
                            unsigned threads) {
  auto counts = parallel_trials(trials, threads, seed, [&](std::size_t, std::uint64_t s) {
    // Each unordered representative pair {a, b} stands for eight ordered
    // pairs of full solutions, four at overlap <a,b> and four at -<a,b>.
    return 8.0 * static_cast<double>(overlap_histogram(solution_set_at(params, m, s)).forbidden_pairs);
  });
  return mean_estimate(counts);
}

}  // namespace ptl
