#pragma once

#include <functional>
#include <vector>

namespace ptl {

struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-14;
  int max_nodes = 1 << 14;
  int hermite_nodes = 64;

  void validate() const;
};

// Adaptive Gauss-Kronrod (7/15) on [a, b]; either bound may be infinite.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg = {});

// Physicists' Gauss-Hermite rule: sum_i w_i f(x_i) approximates
// the integral of exp(-x^2) f(x) over the real line.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes from the symmetric tridiagonal Jacobi matrix (Golub-Welsch). Rules
// are cached per node count.
const GaussHermiteRule& gauss_hermite(int nodes);

// E[f(Y)] for Y ~ N(mean, variance) using the Hermite rule.
double gaussian_expectation(const std::function<double(double)>& f, double mean, double variance,
                            int nodes);

}  // namespace ptl
