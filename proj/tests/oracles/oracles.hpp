#pragma once

// Reference implementations used only by the tests. Each one takes a
// different route from the library code it checks.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                          double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson on a finite interval.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson_rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 48);
}

// Maclaurin series of erf; fine for |x| <= 3 in double precision.
inline double erf_series(double x) {
  double term = x, sum = x;
  for (int k = 1; k < 200; ++k) {
    term *= -x * x / k;
    const double add = term / (2 * k + 1);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return 2.0 / std::sqrt(M_PI) * sum;
}

inline double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

inline double gaussian_mass(double kappa) { return 2.0 * simpson(phi, 0.0, kappa); }

inline double mu2(double kappa) {
  return 2.0 * simpson([](double z) { return z * z * phi(z); }, 0.0, kappa) / gaussian_mass(kappa);
}

// q(gamma) through the correlated pair U = sqrt(g) Z1 + sqrt(1-g) Z2,
// V = sqrt(g) Z1 - sqrt(1-g) Z2 with correlation rho = 2g - 1: condition on U.
inline double pair_prob(double gamma, double kappa) {
  const double rho = 2.0 * gamma - 1.0;
  if (std::abs(rho) >= 1.0) return gaussian_mass(kappa);
  const double s = std::sqrt(1.0 - rho * rho);
  const auto ncdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  return simpson(
      [&](double u) { return phi(u) * (ncdf((kappa - rho * u) / s) - ncdf((-kappa - rho * u) / s)); },
      -kappa, kappa, 1e-14);
}

// C_k by summing over all distinct row tuples and distinct column tuples.
inline double cycle_count(const Eigen::MatrixXd& mat, int k) {
  const int m = static_cast<int>(mat.rows()), n = static_cast<int>(mat.cols());
  std::vector<int> rows(k), cols(k);
  double total = 0.0;
  std::function<void(int)> pick_cols;
  std::function<void(int)> pick_rows = [&](int d) {
    if (d == k) {
      pick_cols(0);
      return;
    }
    for (int i = 0; i < m; ++i) {
      bool used = false;
      for (int e = 0; e < d; ++e) used |= rows[e] == i;
      if (used) continue;
      rows[d] = i;
      pick_rows(d + 1);
    }
  };
  pick_cols = [&](int d) {
    if (d == k) {
      double prod = 1.0;
      for (int l = 0; l < k; ++l) prod *= mat(rows[l], cols[l]) * mat(rows[(l + 1) % k], cols[l]);
      total += prod;
      return;
    }
    for (int j = 0; j < n; ++j) {
      bool used = false;
      for (int e = 0; e < d; ++e) used |= cols[e] == j;
      if (used) continue;
      cols[d] = j;
      pick_cols(d + 1);
    }
  };
  pick_rows(0);
  const double mn = static_cast<double>(m) * n;
  return total / std::pow(mn, 0.5 * k) - (k == 1 ? std::sqrt(mn) : 0.0);
}

// Every x in {+-1}^n (bit i of code set means x_{i+1} = -1) that satisfies all rows.
inline std::vector<std::uint64_t> naive_survivors(const std::vector<Eigen::VectorXd>& rows, double kappa) {
  const int n = static_cast<int>(rows.front().size());
  const double cut = kappa * std::sqrt(static_cast<double>(n));
  std::vector<std::uint64_t> out;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    bool ok = true;
    for (const auto& g : rows) {
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += ((code >> i) & 1 ? -1.0 : 1.0) * g(i);
      if (std::abs(dot) > cut) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(code);
  }
  return out;
}

inline boost::multiprecision::cpp_int binomial(unsigned n, unsigned k) {
  boost::multiprecision::cpp_int c = 1;
  for (unsigned i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

inline double log_big(const boost::multiprecision::cpp_int& c) {
  const unsigned bits = boost::multiprecision::msb(c);
  const unsigned shift = bits > 60 ? bits - 60 : 0;
  const double mant = static_cast<double>(boost::multiprecision::cpp_int(c >> shift));
  return std::log(mant) + shift * std::log(2.0);
}

// n = 2: the two representatives have orthogonal directions, so their
// lifetimes are independent geometric variables with survival p per row and
// P[tau > j] = 1 - (1 - p^j)^2.
inline double n2_expected_tau(double p) {
  double e = 0.0;
  for (int j = 0; j < 100000; ++j) {
    const double pj = std::pow(p, j);
    e += 1.0 - (1.0 - pj) * (1.0 - pj);
    if (pj < 1e-18) break;
  }
  return e;
}

// E X^2 summed directly in linear space with exact integer binomials.
inline double second_moment_direct(int n, long m, const std::function<double(double)>& q) {
  double total = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double gamma = static_cast<double>(k) / n;
    total += std::ldexp(static_cast<double>(binomial(n, k)), n) * std::pow(q(gamma), static_cast<double>(m));
  }
  return total;
}

}  // namespace oracle
