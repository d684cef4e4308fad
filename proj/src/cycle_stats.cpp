#include "ptl/cycle_stats.hpp"

#include "ptl/parallel.hpp"
#include "ptl/special_fn.hpp"
#include "ptl/stats.hpp"

namespace ptl {

double weighted_count(const std::vector<double>& c, double beta, int order) {
  if (order < 0 || static_cast<std::size_t>(order) > c.size())
    throw DomainError("weighted_count: order exceeds the number of supplied cycle counts");
  double y = 0.0;
  for (int k = 1; k <= order; ++k) {
    const double w = std::pow(2.0 * beta, k);
    y += (2.0 * w * c[static_cast<std::size_t>(k - 1)] - w * w) / (4.0 * k);
  }
  return y;
}

double weighted_tail_bound(double beta, int order) {
  const double x = 4.0 * beta * beta;
  double head = 0.0;
  for (int k = 1; k <= order; ++k) head += std::pow(x, k) / (4.0 * k);
  return -0.25 * std::log1p(-x) - head;
}

Eigen::VectorXd shift_vector(double beta, int order) {
  Eigen::VectorXd mu(order);
  for (int k = 1; k <= order; ++k) mu(k - 1) = std::pow(2.0 * beta, k) / std::sqrt(2.0 * k);
  return mu;
}

CycleVector CycleVector::from_counts(std::vector<double> c, double beta) {
  CycleVector out;
  out.order = static_cast<int>(c.size());
  out.y = weighted_count(c, beta, out.order);
  out.v.resize(out.order);
  for (int k = 1; k <= out.order; ++k) out.v(k - 1) = c[static_cast<std::size_t>(k - 1)] / std::sqrt(2.0 * k);
  out.c = std::move(c);
  return out;
}

void CycleExperiment::validate() const {
  if (n < 2) throw DomainError("cycle experiment needs n >= 2");
  if (m < 1) throw DomainError("cycle experiment needs m >= 1");
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  kind.validate(n);
}

Eigen::MatrixXd cycle_samples(const CycleExperiment& exp, int order, std::size_t trials,
                              std::uint64_t seed, unsigned threads) {
  exp.validate();
  detail::check_order(order, exp.m, exp.n);
  if (trials < 1) throw DomainError("trials must be positive");
  auto rows = parallel_trials(trials, threads, seed, [&](std::size_t, std::uint64_t trial_seed) {
    const Eigen::MatrixXd mat = sample_planted_matrix(exp.kind, exp.n, exp.m, exp.kappa, trial_seed);
    return cycle_counts(mat, order);
  });
  Eigen::MatrixXd out(static_cast<Eigen::Index>(trials), order);
  for (std::size_t i = 0; i < trials; ++i)
    for (int k = 0; k < order; ++k) out(static_cast<Eigen::Index>(i), k) = rows[i][static_cast<std::size_t>(k)];
  return out;
}

CycleMoments summarize_column(const Eigen::MatrixXd& samples, int k) {
  std::vector<double> col(samples.rows());
  for (Eigen::Index i = 0; i < samples.rows(); ++i) col[static_cast<std::size_t>(i)] = samples(i, k - 1);
  const auto s = summarize(col);
  return {s.mean, s.variance, s.se_mean, s.se_variance};
}

CycleMoments mc_cycle_moments(const CycleExperiment& exp, int k, std::size_t trials,
                              std::uint64_t seed, unsigned threads) {
  return summarize_column(cycle_samples(exp, k, trials, seed, threads), k);
}

double planted_shift_multiple(const PlantedKind& kind) {
  switch (kind.tag) {
    case PlantedKind::Tag::Null: return 0.0;
    case PlantedKind::Tag::Single: return 1.0;
    case PlantedKind::Tag::Pair: return 2.0;
  }
  return 0.0;
}

CltDiagnostic clt_diagnostic(const Eigen::MatrixXd& samples, const PlantedKind& kind, double beta) {
  const int order = static_cast<int>(samples.cols());
  const Eigen::VectorXd shift = planted_shift_multiple(kind) * shift_vector(beta, order);
  CltDiagnostic out;
  std::vector<std::vector<double>> comps(static_cast<std::size_t>(order));
  for (int k = 1; k <= order; ++k) {
    auto& v = comps[static_cast<std::size_t>(k - 1)];
    v.resize(static_cast<std::size_t>(samples.rows()));
    for (Eigen::Index i = 0; i < samples.rows(); ++i)
      v[static_cast<std::size_t>(i)] = samples(i, k - 1) / std::sqrt(2.0 * k) - shift(k - 1);
    out.ks.push_back(ks_statistic(v, [](double x) { return normal_cdf(x); }));
  }
  out.correlation = Eigen::MatrixXd::Identity(order, order);
  for (int a = 0; a < order; ++a)
    for (int b = a + 1; b < order; ++b)
      out.correlation(a, b) = out.correlation(b, a) =
          sample_correlation(comps[static_cast<std::size_t>(a)], comps[static_cast<std::size_t>(b)]);
  return out;
}

CltDiagnostic clt_diagnostic(const CycleExperiment& exp, int order, std::size_t trials,
                             std::uint64_t seed, unsigned threads) {
  return clt_diagnostic(cycle_samples(exp, order, trials, seed, threads), exp.kind, beta(exp.kappa));
}

}  // namespace ptl
