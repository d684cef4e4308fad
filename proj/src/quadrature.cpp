#include "ptl/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ptl/errors.hpp"

namespace ptl {

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0) || !(rel_tol > 0)) throw DomainError("quadrature tolerances must be positive");
  if (max_nodes < 16 || hermite_nodes < 16)
    throw DomainError("quadrature node counts must be at least 16");
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg) {
  if (a == b) return 0.0;
  // Each level of bisection at most doubles the number of 15-point panels.
  const unsigned depth = static_cast<unsigned>(std::max(1.0, std::log2(cfg.max_nodes / 15.0)));
  double err = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, depth, cfg.rel_tol, &err, &l1);
  if (err > std::max(cfg.abs_tol, 1e3 * cfg.rel_tol * l1))
    throw NumericalInstability("adaptive quadrature did not converge (error estimate " +
                               std::to_string(err) + ")");
  return value;
}

namespace {

GaussHermiteRule build_hermite(int n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double off = std::sqrt(i / 2.0);
    jacobi(i, i - 1) = off;
    jacobi(i - 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  if (eig.info() != Eigen::Success) throw NumericalInstability("Gauss-Hermite eigensolve failed");
  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double sqrt_pi = std::sqrt(M_PI);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = eig.eigenvalues()(i);
    const double v0 = eig.eigenvectors()(0, i);
    rule.weights[i] = sqrt_pi * v0 * v0;
  }
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int nodes) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
  if (nodes < 16) throw DomainError("Gauss-Hermite rule needs at least 16 nodes");
  std::lock_guard lock(mutex);
  auto& slot = cache[nodes];
  if (!slot) slot = std::make_unique<GaussHermiteRule>(build_hermite(nodes));
  return *slot;
}

double gaussian_expectation(const std::function<double(double)>& f, double mean, double variance,
                            int nodes) {
  if (variance == 0.0) return f(mean);
  const auto& rule = gauss_hermite(nodes);
  const double scale = std::sqrt(2.0 * variance);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * f(mean + scale * rule.nodes[i]);
  return sum / std::sqrt(M_PI);
}

}  // namespace ptl
