#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace ptl {

inline constexpr int kMaxDimension = 30;

/// One perceptron instance family: margin kappa and dimension n.
struct ModelParams {
  double kappa;
  int n;

  /// Validates 2 <= n <= 30 and kappa > 0. n above the cap raises
  /// CapacityError because the 2^(n-1)-bit solution set would not fit.
  static ModelParams make(double kappa, int n);

  double cutoff() const;  ///< kappa * sqrt(n)
};

/// One disorder row.
using ConstraintVector = Eigen::VectorXd;

/// Surviving sign vectors, stored one bit per sign-symmetry class. Bit `idx`
/// stands for the x with x_1 = +1 and x_{i+2} = -1 exactly when bit i of idx
/// is set; -x survives iff x does, so the full count is twice the popcount.
class SolutionSet {
 public:
  SolutionSet() = default;

  static SolutionSet full(int n);
  static SolutionSet empty(int n);

  int dimension() const { return n_; }
  std::uint64_t capacity() const { return std::uint64_t{1} << (n_ - 1); }
  std::uint64_t representatives() const;
  std::uint64_t full_count() const { return 2 * representatives(); }
  bool is_empty() const;

  bool contains(std::uint64_t idx) const;
  void insert(std::uint64_t idx);

  /// Representative indices in increasing order.
  std::vector<std::uint64_t> indices() const;

  /// The +-1 vector for representative `idx`.
  Eigen::VectorXd sign_vector(std::uint64_t idx) const;

  /// Keeps exactly the x with |<x, g>| <= kappa sqrt(n).
  void filter(const ConstraintVector& g, double kappa);

  friend bool operator==(const SolutionSet&, const SolutionSet&) = default;

 private:
  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

SolutionSet full_cube(const ModelParams& params);

SolutionSet apply_constraint(SolutionSet s, const ConstraintVector& g, double kappa);

/// Row j (1-based) of the disorder stream rooted at `trial_seed`.
ConstraintVector disorder_row(int n, std::uint64_t trial_seed, std::uint64_t j);

struct ThresholdRecord {
  std::uint64_t seed = 0;
  long tau = 0;
  /// (j, |S^j|) for j = 0..tau, full counts.
  std::vector<std::pair<long, std::uint64_t>> survivor_trace;
  /// Step cap reached with survivors left; tau then holds max_steps + 1 as a lower bound.
  bool censored = false;

  friend bool operator==(const ThresholdRecord&, const ThresholdRecord&) = default;
};

struct ThresholdOptions {
  long max_steps = 10000;
};

/// Draws rows until the solution set first empties. Exceeding 10 alpha_c n
/// steps raises RunawayError; the hard cap `max_steps` censors instead.
ThresholdRecord sample_threshold(const ModelParams& params, std::uint64_t seed,
                                 const ThresholdOptions& opts = {});

SolutionSet solution_set_at(const ModelParams& params, long m, std::uint64_t seed);

/// X = |S^m| (full count) on the stream rooted at `seed`.
std::uint64_t survivor_count_at(const ModelParams& params, long m, std::uint64_t seed);

struct PlantedKind {
  enum class Tag { Null, Single, Pair };
  Tag tag = Tag::Null;
  int t = 0;

  static PlantedKind null() { return {Tag::Null, 0}; }
  static PlantedKind single() { return {Tag::Single, 0}; }
  static PlantedKind pair(int t) { return {Tag::Pair, t}; }

  std::string name() const;
  /// Parses "null", "single", "pair" (t supplied separately).
  static PlantedKind parse(const std::string& name, int t = 0);
  void validate(int n) const;
};

/// v_t: (n+t)/2 leading ones followed by minus ones.
Eigen::VectorXd planted_direction(int n, int t);

inline constexpr long kRejectionBudget = 1'000'000;

/// A row from Delta_0 (Null), Delta_1 (Single) or Delta_2(t) (Pair) by
/// rejection on a standard Gaussian proposal.
ConstraintVector sample_planted_row(const PlantedKind& kind, int n, double kappa, std::uint64_t seed);

/// m planted rows; row j (1-based) uses stream split_seed(seed, j).
Eigen::MatrixXd sample_planted_matrix(const PlantedKind& kind, int n, long m, double kappa,
                                      std::uint64_t seed);

/// ceil(sqrt(n) log n), natural log.
int forbidden_band_lower(int n);

struct OverlapHistogram {
  std::map<int, std::uint64_t> counts;  ///< |<x1,x2>| -> unordered representative pairs
  int band_lower = 0;
  std::optional<int> max_forbidden_overlap;
  std::uint64_t forbidden_pairs = 0;
};

inline constexpr std::uint64_t kPairSurvivorBudget = 10'000;

OverlapHistogram overlap_histogram(const SolutionSet& s);

struct GramDeviation {
  double frobenius_dev;   ///< ||M M^T / n - I||_HS over representative rows
  double kl_to_identity;  ///< KL(N(0, M M^T / n) || N(0, I))
};

inline constexpr std::uint64_t kGramSurvivorBudget = 1'000;

GramDeviation gram_deviation(const SolutionSet& s);

struct EmptyingPoint {
  int dt;
  double empirical;  ///< fraction of included trials empty at tau_pre + dt
  double predicted;  ///< mean over trials of (1 - p^dt)^(X/2)
  double band99;     ///< 99% normal band half-width around `predicted`
};

struct EmptyingCurve {
  std::vector<EmptyingPoint> points;
  std::size_t included = 0;
  std::size_t excluded = 0;  ///< trials already empty at tau_pre
};

EmptyingCurve conditional_emptying_curve(const ModelParams& params, long tau_pre, int horizon,
                                         std::size_t trials, std::uint64_t seed,
                                         unsigned threads = 1);

}  // namespace ptl
