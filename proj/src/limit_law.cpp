#include "ptl/limit_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ptl/errors.hpp"
#include "ptl/moments.hpp"
#include "ptl/parallel.hpp"
#include "ptl/rng.hpp"
#include "ptl/stats.hpp"

namespace ptl {

namespace {

constexpr double kCrossCheckTol = 1e-8;
constexpr double kRange = 200.0;

// Emptying probability given Z* = z, and its complement.
double given_z(const LimitLaw& law, double k, double z) {
  return std::exp(-0.5 * std::exp(z + k * std::log(law.p)));
}
double given_z_complement(const LimitLaw& law, double k, double z) {
  return -std::expm1(-0.5 * std::exp(z + k * std::log(law.p)));
}

template <typename F>
double checked_expectation(const LimitLaw& law, F&& f, const QuadratureConfig& cfg) {
  const double hermite = gaussian_expectation(f, law.zstar_mean, law.zstar_var, cfg.hermite_nodes);
  if (law.zstar_var == 0.0) return hermite;
  const double sd = std::sqrt(law.zstar_var);
  const double adaptive = integrate(
      [&](double u) { return f(law.zstar_mean + sd * u) * std::exp(-0.5 * u * u); },
      -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), cfg) /
      std::sqrt(2.0 * M_PI);
  if (std::abs(hermite - adaptive) > kCrossCheckTol)
    throw NumericalInstability("limit law: Gauss-Hermite " + std::to_string(hermite) +
                               " and adaptive " + std::to_string(adaptive) + " disagree");
  return hermite;
}

}  // namespace

LimitLaw LimitLaw::from_constants(const Constants& c) {
  LimitLaw law{c.p, c.zstar_mean, c.zstar_var, c.alpha_c};
  law.validate();
  return law;
}

LimitLaw LimitLaw::degenerate(double kappa) {
  LimitLaw law{gaussian_mass(kappa), 0.0, 0.0, critical_alpha(kappa)};
  law.validate();
  return law;
}

void LimitLaw::validate() const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("limit law needs p in (0, 1)");
  if (!(zstar_var >= 0.0) || std::abs(zstar_var + 2.0 * zstar_mean) > 1e-12)
    throw DomainError("limit law needs zstar_var = -2 zstar_mean >= 0");
  if (!(alpha_c > 0.0) || !std::isfinite(alpha_c)) throw DomainError("limit law needs finite alpha_c");
}

double limit_cdf(const LimitLaw& law, double k, const QuadratureConfig& cfg) {
  if (!std::isfinite(k)) throw DomainError("limit_cdf needs finite k");
  return std::clamp(checked_expectation(law, [&](double z) { return given_z(law, k, z); }, cfg), 0.0, 1.0);
}

double limit_survival(const LimitLaw& law, double k, const QuadratureConfig& cfg) {
  if (!std::isfinite(k)) throw DomainError("limit_survival needs finite k");
  return std::clamp(checked_expectation(law, [&](double z) { return given_z_complement(law, k, z); }, cfg),
                    0.0, 1.0);
}

double limit_quantile(const LimitLaw& law, double prob, const QuadratureConfig& cfg) {
  if (!(prob > 0.0 && prob < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  double lo = -kRange, hi = kRange;
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    (limit_cdf(law, mid, cfg) < prob ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

long lattice_quantile(const LimitLaw& law, double shift, double prob, const QuadratureConfig& cfg) {
  long tau = static_cast<long>(std::ceil(shift + limit_quantile(law, prob, cfg))) - 2;
  while (limit_cdf(law, static_cast<double>(tau) - shift, cfg) < prob) ++tau;
  while (limit_cdf(law, static_cast<double>(tau - 1) - shift, cfg) >= prob) --tau;
  return tau;
}

double upper_tail_slope(const LimitLaw& law, int k_lo, int k_hi, const QuadratureConfig& cfg) {
  if (k_hi <= k_lo) throw DomainError("tail slope needs k_hi > k_lo");
  double sk = 0, sy = 0, skk = 0, sky = 0;
  const double count = k_hi - k_lo + 1;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double y = std::log(limit_survival(law, k, cfg));
    sk += k;
    sy += y;
    skk += static_cast<double>(k) * k;
    sky += k * y;
  }
  return (count * sky - sk * sy) / (count * skk - sk * sk);
}

double binomial_emptying(std::uint64_t count, double survive_prob) {
  if (!(survive_prob >= 0.0 && survive_prob <= 1.0)) throw DomainError("survival probability outside [0, 1]");
  if (count == 0) return 1.0;
  return std::pow(1.0 - survive_prob, static_cast<double>(count));
}

// ---------------------------------------------------------------------------

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(values.begin(), values.end(), x);
  return static_cast<double>(it - values.begin()) / static_cast<double>(values.size());
}

double EmpiricalCdf::median() const {
  const std::size_t t = values.size();
  return values[(t + 1) / 2 - 1];
}

EmpiricalCdf empirical_cdf(std::span<const ThresholdRecord> records, double shift) {
  if (records.size() < kMinEmpiricalRecords)
    throw SampleSizeError("empirical CDF needs at least " + std::to_string(kMinEmpiricalRecords) +
                          " records, got " + std::to_string(records.size()));
  if (!std::isfinite(shift)) throw DomainError("empirical CDF shift must be finite");
  EmpiricalCdf emp;
  emp.shift = shift;
  emp.values.reserve(records.size());
  for (const auto& r : records) emp.values.push_back(static_cast<double>(r.tau) - shift);
  std::sort(emp.values.begin(), emp.values.end());
  return emp;
}

EmpiricalCdf empirical_cdf(std::span<const ThresholdRecord> records, const ModelParams& params) {
  return empirical_cdf(records, critical_alpha(params.kappa) * params.n);
}

double ks_distance(const EmpiricalCdf& emp, const LimitLaw& law, const QuadratureConfig& cfg) {
  if (emp.values.empty()) throw SampleSizeError("KS distance of an empty sample");
  const long lo = std::lround(emp.values.front() + emp.shift) - 1;
  const long hi = std::lround(emp.values.back() + emp.shift);
  double d = 0.0;
  for (long tau = lo; tau <= hi; ++tau) {
    const double k = static_cast<double>(tau) - emp.shift;
    // emp(k) counts samples tau_i <= tau; guard against rounding of tau_i - shift.
    const double f_emp = emp(k + 1e-9);
    d = std::max(d, std::abs(f_emp - limit_cdf(law, k, cfg)));
  }
  return d;
}

std::vector<ThresholdRecord> sample_from_law(const LimitLaw& law, double shift, std::size_t count,
                                             std::uint64_t seed) {
  // Tabulate the lattice CDF once over the range where it moves.
  const long first = static_cast<long>(std::floor(shift - kRange));
  const long last = static_cast<long>(std::ceil(shift + kRange));
  std::vector<double> cdf;
  for (long tau = first; tau <= last; ++tau) cdf.push_back(limit_cdf(law, static_cast<double>(tau) - shift));
  std::vector<ThresholdRecord> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    NormalStream stream(split_seed(seed, i));
    const double u = stream.uniform();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    out[i].seed = split_seed(seed, i);
    out[i].tau = first + static_cast<long>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
  }
  return out;
}

LognormalFit lognormal_fit(const ModelParams& params, long tau_pre, std::size_t trials, std::uint64_t seed,
                           unsigned threads, std::optional<ZStarParams> reference) {
  if (tau_pre < 1) throw DomainError("tau_pre must be at least 1");
  if (trials < 1) throw DomainError("trials must be at least 1");
  const ZStarParams ref = reference ? *reference : zstar_params(beta(params.kappa));
  const double log_mean = log_first_moment(params.n, tau_pre, params.kappa);
  const auto counts = parallel_trials(trials, threads, seed, [&](std::size_t, std::uint64_t s) {
    return survivor_count_at(params, tau_pre, s);
  });
  LognormalFit fit{};
  for (std::uint64_t x : counts) {
    if (x == 0) {
      ++fit.excluded;
      continue;
    }
    fit.log_ratios.push_back(std::log(static_cast<double>(x)) - log_mean);
  }
  fit.included = fit.log_ratios.size();
  fit.regime_warning = 5 * fit.excluded > trials;
  fit.ks = fit.included == 0 ? 1.0
                             : ks_statistic(fit.log_ratios, [&](double v) {
                                 return normal_cdf(v, ref.mean, ref.variance);
                               });
  return fit;
}

ThresholdMoments threshold_moments(const EmpiricalCdf& emp) {
  const SampleSummary s = summarize(emp.values);
  return {s.mean, s.variance, s.se_mean, s.se_variance};
}

}  // namespace ptl
