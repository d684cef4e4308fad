#include "ptl/simulator.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "ptl/errors.hpp"
#include "ptl/parallel.hpp"
#include "ptl/rng.hpp"
#include "ptl/special_fn.hpp"

namespace ptl {

ModelParams ModelParams::make(double kappa, int n) {
  if (!std::isfinite(kappa) || !(kappa > 0.0))
    throw DomainError("kappa must be positive and finite, got " + std::to_string(kappa));
  if (n < 2) throw DomainError("dimension n must be at least 2, got " + std::to_string(n));
  if (n > kMaxDimension)
    throw CapacityError("dimension n=" + std::to_string(n) + " exceeds the enumeration budget: the " +
                        "solution set needs 2^(n-1) bits and n is capped at " +
                        std::to_string(kMaxDimension) + " (2^29 bits = 64 MiB)");
  return {kappa, n};
}

double ModelParams::cutoff() const { return kappa * std::sqrt(static_cast<double>(n)); }

// ---------------------------------------------------------------------------
// SolutionSet

namespace {

std::size_t word_count(int n) { return ((std::uint64_t{1} << (n - 1)) + 63) / 64; }

void check_dimension(int n) {
  if (n < 2 || n > kMaxDimension) (void)ModelParams::make(1.0, n);
}

}  // namespace

SolutionSet SolutionSet::empty(int n) {
  check_dimension(n);
  SolutionSet s;
  s.n_ = n;
  s.words_.assign(word_count(n), 0);
  return s;
}

SolutionSet SolutionSet::full(int n) {
  SolutionSet s = empty(n);
  const std::uint64_t cap = s.capacity();
  if (cap >= 64) {
    std::fill(s.words_.begin(), s.words_.end(), ~std::uint64_t{0});
  } else {
    s.words_[0] = (std::uint64_t{1} << cap) - 1;
  }
  return s;
}

std::uint64_t SolutionSet::representatives() const {
  std::uint64_t c = 0;
  for (auto w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
  return c;
}

bool SolutionSet::is_empty() const {
  for (auto w : words_)
    if (w) return false;
  return true;
}

bool SolutionSet::contains(std::uint64_t idx) const {
  return idx < capacity() && ((words_[idx >> 6] >> (idx & 63)) & 1U);
}

void SolutionSet::insert(std::uint64_t idx) {
  if (idx >= capacity()) throw DomainError("representative index out of range");
  words_[idx >> 6] |= std::uint64_t{1} << (idx & 63);
}

std::vector<std::uint64_t> SolutionSet::indices() const {
  std::vector<std::uint64_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    for (std::uint64_t word = words_[w]; word; word &= word - 1)
      out.push_back(w * 64 + static_cast<std::uint64_t>(std::countr_zero(word)));
  }
  return out;
}

Eigen::VectorXd SolutionSet::sign_vector(std::uint64_t idx) const {
  Eigen::VectorXd x(n_);
  x(0) = 1.0;
  for (int i = 0; i + 1 < n_; ++i) x(i + 1) = ((idx >> i) & 1U) ? -1.0 : 1.0;
  return x;
}

void SolutionSet::filter(const ConstraintVector& g, double kappa) {
  if (g.size() != n_)
    throw DomainError("constraint length " + std::to_string(g.size()) + " does not match n=" +
                      std::to_string(n_));
  // <x, g> = low[idx & mask] + high[idx >> low_bits]: two partial-sum tables
  // over the low and high halves of the representative index, each filled in
  // O(1) per entry from the entry with its lowest set bit cleared.
  const int bits = n_ - 1;
  const int low_bits = bits <= 6 ? bits : std::max(6, (bits + 1) / 2);
  const int high_bits = bits - low_bits;
  std::vector<double> low(std::size_t{1} << low_bits);
  std::vector<double> high(std::size_t{1} << high_bits);
  low[0] = g.segment(1, low_bits).sum();
  for (std::size_t idx = 1; idx < low.size(); ++idx)
    low[idx] = low[idx & (idx - 1)] - 2.0 * g(1 + std::countr_zero(idx));
  high[0] = g(0) + g.tail(high_bits).sum();
  for (std::size_t idx = 1; idx < high.size(); ++idx)
    high[idx] = high[idx & (idx - 1)] - 2.0 * g(1 + low_bits + std::countr_zero(idx));

  const double cut = kappa * std::sqrt(static_cast<double>(n_));
  if (bits < 6) {
    std::uint64_t keep = 0;
    for (std::size_t idx = 0; idx < low.size(); ++idx)
      keep |= static_cast<std::uint64_t>(std::abs(low[idx] + high[0]) <= cut) << idx;
    words_[0] &= keep;
    return;
  }
  const std::uint64_t low_mask = (std::uint64_t{1} << low_bits) - 1;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t word = words_[w];
    if (!word) continue;
    const std::uint64_t base = w * 64;
    const double h = high[base >> low_bits];
    const double* lo = low.data() + (base & low_mask);
    if (std::popcount(word) > 16) {
      std::uint64_t keep = 0;
      for (int b = 0; b < 64; ++b)
        keep |= static_cast<std::uint64_t>(std::abs(lo[b] + h) <= cut) << b;
      words_[w] = word & keep;
    } else {
      for (std::uint64_t rest = word; rest; rest &= rest - 1) {
        const int b = std::countr_zero(rest);
        if (!(std::abs(lo[b] + h) <= cut)) word &= ~(std::uint64_t{1} << b);
      }
      words_[w] = word;
    }
  }
}

SolutionSet full_cube(const ModelParams& params) { return SolutionSet::full(params.n); }

SolutionSet apply_constraint(SolutionSet s, const ConstraintVector& g, double kappa) {
  s.filter(g, kappa);
  return s;
}

// ---------------------------------------------------------------------------
// Threshold sampling

ConstraintVector disorder_row(int n, std::uint64_t trial_seed, std::uint64_t j) {
  NormalStream rng(split_seed(trial_seed, j));
  ConstraintVector g(n);
  rng.fill(g);
  return g;
}

ThresholdRecord sample_threshold(const ModelParams& params, std::uint64_t seed,
                                 const ThresholdOptions& opts) {
  const double runaway = 10.0 * critical_alpha(params.kappa) * params.n;
  ThresholdRecord rec;
  rec.seed = seed;
  SolutionSet s = full_cube(params);
  rec.survivor_trace.emplace_back(0, s.full_count());
  for (long j = 1;; ++j) {
    if (j > opts.max_steps) {
      rec.censored = true;
      rec.tau = opts.max_steps + 1;
      break;
    }
    if (static_cast<double>(j) > runaway)
      throw RunawayError("no emptying after " + std::to_string(j - 1) + " constraints (10 alpha_c n = " +
                         std::to_string(runaway) + ")");
    s.filter(disorder_row(params.n, seed, static_cast<std::uint64_t>(j)), params.kappa);
    const std::uint64_t count = s.full_count();
    rec.survivor_trace.emplace_back(j, count);
    if (count == 0) {
      rec.tau = j;
      break;
    }
  }
  return rec;
}

SolutionSet solution_set_at(const ModelParams& params, long m, std::uint64_t seed) {
  if (m < 0) throw DomainError("number of constraints must be nonnegative");
  SolutionSet s = full_cube(params);
  for (long j = 1; j <= m && !s.is_empty(); ++j)
    s.filter(disorder_row(params.n, seed, static_cast<std::uint64_t>(j)), params.kappa);
  return s;
}

std::uint64_t survivor_count_at(const ModelParams& params, long m, std::uint64_t seed) {
  return solution_set_at(params, m, seed).full_count();
}

// ---------------------------------------------------------------------------
// Planted rows

std::string PlantedKind::name() const {
  switch (tag) {
    case Tag::Null: return "null";
    case Tag::Single: return "single";
    case Tag::Pair: return "pair";
  }
  return "unknown";
}

PlantedKind PlantedKind::parse(const std::string& name, int t) {
  if (name == "null") return null();
  if (name == "single") return single();
  if (name == "pair") return pair(t);
  throw DomainError("unknown planted kind '" + name + "' (expected null, single or pair)");
}

void PlantedKind::validate(int n) const {
  if (tag != Tag::Pair) return;
  if (std::abs(t) > n || ((n + t) % 2) != 0)
    throw DomainError("planted pair needs |t| <= n and t = n (mod 2); got t=" + std::to_string(t) +
                      ", n=" + std::to_string(n));
}

Eigen::VectorXd planted_direction(int n, int t) {
  PlantedKind::pair(t).validate(n);
  const int ones = (n + t) / 2;
  Eigen::VectorXd v(n);
  v.head(ones).setOnes();
  v.tail(n - ones).setConstant(-1.0);
  return v;
}

ConstraintVector sample_planted_row(const PlantedKind& kind, int n, double kappa, std::uint64_t seed) {
  if (n < 1) throw DomainError("row length must be positive");
  kind.validate(n);
  NormalStream rng(seed);
  ConstraintVector g(n);
  const double cut = kappa * std::sqrt(static_cast<double>(n));
  const int ones = (n + kind.t) / 2;
  for (long attempt = 0; attempt < kRejectionBudget; ++attempt) {
    rng.fill(g);
    if (kind.tag == PlantedKind::Tag::Null) return g;
    const double head = g.head(ones).sum();
    const double tail = g.tail(n - ones).sum();
    if (kind.tag == PlantedKind::Tag::Single) {
      if (std::abs(g.sum()) <= cut) return g;
      continue;
    }
    if (std::abs(g.sum()) <= cut && std::abs(head - tail) <= cut) return g;
  }
  throw SamplingError("rejection budget of " + std::to_string(kRejectionBudget) + " exhausted for " +
                      kind.name() + " row");
}

Eigen::MatrixXd sample_planted_matrix(const PlantedKind& kind, int n, long m, double kappa,
                                      std::uint64_t seed) {
  if (m < 1) throw DomainError("planted matrix needs at least one row");
  Eigen::MatrixXd out(m, n);
  for (long j = 0; j < m; ++j)
    out.row(j) = sample_planted_row(kind, n, kappa, split_seed(seed, static_cast<std::uint64_t>(j + 1)))
                     .transpose();
  return out;
}

// ---------------------------------------------------------------------------
// Geometry diagnostics

int forbidden_band_lower(int n) {
  const double nd = static_cast<double>(n);
  return static_cast<int>(std::ceil(std::sqrt(nd) * std::log(nd)));
}

OverlapHistogram overlap_histogram(const SolutionSet& s) {
  const auto idx = s.indices();
  if (idx.size() > kPairSurvivorBudget)
    throw CapacityError("overlap histogram: " + std::to_string(idx.size()) +
                        " survivors exceed the pair budget of " + std::to_string(kPairSurvivorBudget) +
                        "; apply more constraints first");
  OverlapHistogram h;
  const int n = s.dimension();
  h.band_lower = forbidden_band_lower(n);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      const int overlap = std::abs(n - 2 * std::popcount(idx[a] ^ idx[b]));
      ++h.counts[overlap];
      if (overlap >= h.band_lower && overlap <= n - 1) {
        ++h.forbidden_pairs;
        if (!h.max_forbidden_overlap || overlap > *h.max_forbidden_overlap) h.max_forbidden_overlap = overlap;
      }
    }
  }
  return h;
}

GramDeviation gram_deviation(const SolutionSet& s) {
  const auto idx = s.indices();
  if (idx.empty()) throw DomainError("gram deviation of an empty solution set");
  if (idx.size() > kGramSurvivorBudget)
    throw CapacityError("gram deviation: " + std::to_string(idx.size()) + " survivors exceed budget " +
                        std::to_string(kGramSurvivorBudget));
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(idx.size()), s.dimension());
  for (std::size_t r = 0; r < idx.size(); ++r) rows.row(static_cast<Eigen::Index>(r)) = s.sign_vector(idx[r]);
  const Eigen::MatrixXd gram = rows * rows.transpose() / static_cast<double>(s.dimension());
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
  return {(gram - eye).norm(), gaussian_kl(gram, eye)};
}

EmptyingCurve conditional_emptying_curve(const ModelParams& params, long tau_pre, int horizon,
                                         std::size_t trials, std::uint64_t seed, unsigned threads) {
  const double log_p = log_gaussian_mass(params.kappa);
  const double max_horizon = 4.0 * std::log(static_cast<double>(params.n)) / std::abs(log_p);
  if (horizon < 0 || horizon > max_horizon)
    throw DomainError("horizon must lie in [0, 4 log n / |log p|] = [0, " + std::to_string(max_horizon) + "]");
  if (tau_pre < 0) throw DomainError("tau_pre must be nonnegative");
  if (trials < 1) throw DomainError("trials must be positive");

  struct Trial {
    std::uint64_t x;
    std::vector<char> empty;
  };
  auto results = parallel_trials(trials, threads, seed, [&](std::size_t, std::uint64_t trial_seed) {
    Trial t{};
    SolutionSet s = solution_set_at(params, tau_pre, trial_seed);
    t.x = s.full_count();
    if (t.x == 0) return t;
    t.empty.push_back(0);
    for (int dt = 1; dt <= horizon; ++dt) {
      s.filter(disorder_row(params.n, trial_seed, static_cast<std::uint64_t>(tau_pre + dt)), params.kappa);
      t.empty.push_back(s.is_empty() ? 1 : 0);
    }
    return t;
  });

  EmptyingCurve curve;
  for (const auto& t : results) (t.x == 0 ? curve.excluded : curve.included) += 1;
  if (curve.included == 0) return curve;
  const double p = std::exp(log_p);
  for (int dt = 0; dt <= horizon; ++dt) {
    double hits = 0.0;
    double predicted = 0.0;
    double spread = 0.0;
    const double survive = std::pow(p, dt);
    for (const auto& t : results) {
      if (t.x == 0) continue;
      hits += t.empty[static_cast<std::size_t>(dt)];
      const double pi = std::pow(1.0 - survive, static_cast<double>(t.x / 2));
      predicted += pi;
      spread += pi * (1.0 - pi);
    }
    const double inc = static_cast<double>(curve.included);
    curve.points.push_back({dt, hits / inc, predicted / inc, 2.5758293035489 * std::sqrt(spread) / inc});
  }
  return curve;
}

}  // namespace ptl
