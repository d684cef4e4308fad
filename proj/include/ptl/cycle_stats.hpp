#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ptl/errors.hpp"
#include "ptl/simulator.hpp"

namespace ptl {

inline constexpr int kMaxCycleOrder = 3;

namespace detail {

// Sums over distinct row and column indices of the closed alternating walk
// i1 j1 i2 j2 ... ik jk i1, obtained by Moebius inversion over coincidence
// patterns of the row indices and of the column indices. Every pattern
// reduces to a contraction of B = M^T M, the row and column square norms
// r and c, and entrywise powers of M.
template <typename Derived>
std::vector<double> distinct_cycle_sums(const Eigen::MatrixBase<Derived>& mat, int max_order) {
  using Mat = Eigen::MatrixXd;
  using Vec = Eigen::VectorXd;
  const Mat m = mat.template cast<double>();
  const Eigen::ArrayXXd sq = m.array().square();
  const Vec r = sq.rowwise().sum();
  const Vec c = sq.colwise().sum().transpose();
  std::vector<double> out;
  out.push_back(sq.sum());
  if (max_order < 2) return out;

  Mat lower = Mat::Zero(m.cols(), m.cols());
  lower.template selfadjointView<Eigen::Lower>().rankUpdate(m.transpose());
  const Mat b = lower.template selfadjointView<Eigen::Lower>();
  const Eigen::ArrayXXd quart = sq.square();
  out.push_back(b.squaredNorm() - c.squaredNorm() - r.squaredNorm() + quart.sum());
  if (max_order < 3) return out;

  const Mat b2 = b * b;
  const Mat mb = m * b;
  const double trace_b3 = b2.cwiseProduct(b).sum();
  const double row_weighted = (mb.cwiseProduct(m).rowwise().sum().array() * r.array()).sum();
  const double col_weighted = (b2.diagonal().array() * c.array()).sum();
  const double cube_pair = (m.array().cube() * mb.array()).sum();
  const double square_rc = r.dot(sq.matrix() * c);
  const double row_quart = r.dot(quart.rowwise().sum().matrix());
  const double col_quart = c.dot(quart.colwise().sum().transpose().matrix());
  out.push_back(trace_b3 - 3.0 * row_weighted - 3.0 * col_weighted + 2.0 * r.array().cube().sum() +
                2.0 * c.array().cube().sum() + 6.0 * cube_pair + 3.0 * square_rc - 6.0 * row_quart -
                6.0 * col_quart + 4.0 * (quart * sq).sum());
  return out;
}

inline void check_order(int k, Eigen::Index rows, Eigen::Index cols) {
  if (k < 1 || k > kMaxCycleOrder)
    throw DomainError("cycle order " + std::to_string(k) + " unsupported (exact forms exist for k <= 3)");
  if (rows < k || cols < k)
    throw DomainError("matrix " + std::to_string(rows) + "x" + std::to_string(cols) +
                      " too small for cycle order " + std::to_string(k));
}

}  // namespace detail

/// Normalised 2k-cycle counts C_1..C_K of an m x n disorder matrix:
/// (mn)^{-k/2} times the distinct-index cycle sum, minus sqrt(mn) for k = 1.
template <typename Derived>
std::vector<double> cycle_counts(const Eigen::MatrixBase<Derived>& mat, int max_order) {
  detail::check_order(max_order, mat.rows(), mat.cols());
  const double mn = static_cast<double>(mat.rows()) * static_cast<double>(mat.cols());
  auto sums = detail::distinct_cycle_sums(mat, max_order);
  for (int k = 1; k <= max_order; ++k) sums[k - 1] /= std::pow(mn, 0.5 * k);
  sums[0] -= std::sqrt(mn);
  return sums;
}

template <typename Derived>
double cycle_count(const Eigen::MatrixBase<Derived>& mat, int k) {
  detail::check_order(k, mat.rows(), mat.cols());
  return cycle_counts(mat, k)[static_cast<std::size_t>(k - 1)];
}

/// Per-row means over the column blocks [1, (n+t)/2] and ((n+t)/2, n]: an m x 2 matrix.
template <typename Derived>
Eigen::MatrixX2d block_means(const Eigen::MatrixBase<Derived>& mat, int t) {
  const int n = static_cast<int>(mat.cols());
  if (std::abs(t) >= n || ((n + t) % 2) != 0)
    throw DomainError("block split needs |t| < n and t = n (mod 2); got t=" + std::to_string(t));
  const int left = (n + t) / 2;
  Eigen::MatrixX2d out(mat.rows(), 2);
  out.col(0) = mat.leftCols(left).rowwise().mean().template cast<double>();
  out.col(1) = mat.rightCols(n - left).rowwise().mean().template cast<double>();
  return out;
}

/// Cycle count of the matrix whose entries are the block-centred entries of
/// `mat` plus the supplied per-row block values `sigma` (m x 2). Supplying
/// block_means(mat, t) reproduces cycle_count(mat, k).
template <typename D1, typename D2>
double decomposed_cycle_count(const Eigen::MatrixBase<D1>& mat, int k, int t,
                              const Eigen::MatrixBase<D2>& sigma) {
  const Eigen::MatrixX2d own = block_means(mat, t);
  if (sigma.rows() != mat.rows() || sigma.cols() != 2)
    throw DomainError("sigma must supply two block values per row");
  const int n = static_cast<int>(mat.cols());
  const int left = (n + t) / 2;
  Eigen::MatrixXd shifted = mat.template cast<double>();
  for (Eigen::Index j = 0; j < shifted.rows(); ++j) {
    shifted.row(j).head(left).array() += sigma(j, 0) - own(j, 0);
    shifted.row(j).tail(n - left).array() += sigma(j, 1) - own(j, 1);
  }
  return cycle_count(shifted, k);
}

/// Y_K = sum_{k<=K} (2 (2 beta)^k C_k - (2 beta)^{2k}) / (4k).
double weighted_count(const std::vector<double>& c, double beta, int order);

/// Sum_{k>K} (2 beta)^{2k} / (4k): what truncating Y at order K drops from its mean.
double weighted_tail_bound(double beta, int order);

/// mu_k = (2 beta)^k / sqrt(2k), k = 1..K.
Eigen::VectorXd shift_vector(double beta, int order);

struct CycleVector {
  int order = 0;
  std::vector<double> c;  ///< C_1..C_K
  double y = 0.0;         ///< Y_K
  Eigen::VectorXd v;      ///< C_k / sqrt(2k)

  static CycleVector from_counts(std::vector<double> c, double beta);
};

struct CycleExperiment {
  PlantedKind kind;
  int n;
  long m;
  double kappa;

  void validate() const;
};

/// trials x K matrix of C_1..C_K for matrices drawn row-wise from the planted law.
Eigen::MatrixXd cycle_samples(const CycleExperiment& exp, int order, std::size_t trials,
                              std::uint64_t seed, unsigned threads = 1);

struct CycleMoments {
  double mean;
  double variance;
  double se_mean;
  double se_variance;
};

CycleMoments mc_cycle_moments(const CycleExperiment& exp, int k, std::size_t trials,
                              std::uint64_t seed, unsigned threads = 1);

CycleMoments summarize_column(const Eigen::MatrixXd& samples, int k);

/// Multiple of mu the planted law shifts V by: 0, 1 or 2.
double planted_shift_multiple(const PlantedKind& kind);

struct CltDiagnostic {
  std::vector<double> ks;      ///< per component, V_k - shift vs N(0, 1)
  Eigen::MatrixXd correlation; ///< sample correlation of the components
};

CltDiagnostic clt_diagnostic(const Eigen::MatrixXd& samples, const PlantedKind& kind, double beta);

CltDiagnostic clt_diagnostic(const CycleExperiment& exp, int order, std::size_t trials,
                             std::uint64_t seed, unsigned threads = 1);

}  // namespace ptl
