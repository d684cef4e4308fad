#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ptl/cycle_stats.hpp"
#include "ptl/errors.hpp"
#include "ptl/special_fn.hpp"

using namespace ptl;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int m, int n) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd a(m, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = z(rng);
  return a;
}

}  // namespace

TEST_SUITE("cycle_stats") {
  TEST_CASE("trivial values") {
    CHECK(cycle_count(Eigen::MatrixXd::Zero(3, 4), 1) == doctest::Approx(-std::sqrt(12.0)));
    Eigen::MatrixXd signs(3, 4);
    signs << 1, -1, 1, 1, -1, -1, 1, -1, 1, 1, 1, -1;
    CHECK(cycle_count(signs, 1) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(cycle_count(Eigen::MatrixXd::Ones(2, 3), 2) == doctest::Approx(2.0).epsilon(1e-14));
  }

  TEST_CASE("closed forms against distinct-tuple enumeration") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> dim(3, 6);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd a = random_matrix(rng, dim(rng), dim(rng));
      const auto c = cycle_counts(a, 3);
      for (int k = 1; k <= 3; ++k) CHECK(std::abs(c[k - 1] - oracle::cycle_count(a, k)) < 1e-9);
    }
    const Eigen::MatrixXd a = random_matrix(rng, 4, 5);
    CHECK(std::abs(cycle_count(a, 3) - oracle::cycle_count(a, 3)) < 1e-9);
  }

  TEST_CASE("order and size checks") {
    const Eigen::MatrixXd a = Eigen::MatrixXd::Ones(4, 4);
    CHECK_THROWS_AS(cycle_count(a, 4), DomainError);
    CHECK_THROWS_AS(cycle_count(a, 0), DomainError);
    CHECK_THROWS_AS(cycle_count(Eigen::MatrixXd::Ones(2, 5), 3), DomainError);
  }

  TEST_CASE("permutation and sign invariance") {
    std::mt19937_64 rng(5);
    const Eigen::MatrixXd a = random_matrix(rng, 6, 7);
    Eigen::PermutationMatrix<Eigen::Dynamic> pr(6), pc(7);
    pr.setIdentity();
    pc.setIdentity();
    std::shuffle(pr.indices().data(), pr.indices().data() + 6, rng);
    std::shuffle(pc.indices().data(), pc.indices().data() + 7, rng);
    const Eigen::MatrixXd b = pr * a * pc;
    for (int k = 1; k <= 3; ++k) {
      CHECK(cycle_count(b, k) == doctest::Approx(cycle_count(a, k)).epsilon(1e-12));
      CHECK(cycle_count(Eigen::MatrixXd(-a), k) == doctest::Approx(cycle_count(a, k)).epsilon(1e-12));
    }
  }

  TEST_CASE("expression arguments") {
    std::mt19937_64 rng(6);
    const Eigen::MatrixXd a = random_matrix(rng, 5, 5);
    const Eigen::MatrixXf af = a.cast<float>();
    CHECK(cycle_count(2.0 * a, 2) == doctest::Approx(16.0 * cycle_count(a, 2)).epsilon(1e-12));
    CHECK(cycle_count(af, 2) == doctest::Approx(cycle_count(af.cast<double>(), 2)).epsilon(1e-12));
  }

  TEST_CASE("block decomposition identity") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::MatrixXd a = random_matrix(rng, 5, 6);
      for (int t : {-4, -2, 0, 2, 4})
        for (int k = 1; k <= 3; ++k)
          CHECK(std::abs(decomposed_cycle_count(a, k, t, block_means(a, t)) - cycle_count(a, k)) < 1e-9);
    }
    const Eigen::MatrixXd a = random_matrix(rng, 5, 6);
    const auto mean = block_means(a, 2);
    Eigen::MatrixXd centred = a;
    centred.leftCols(4).colwise() -= mean.col(0);
    centred.rightCols(2).colwise() -= mean.col(1);
    const Eigen::MatrixX2d zero = Eigen::MatrixX2d::Zero(5, 2);
    CHECK(decomposed_cycle_count(centred, 2, 2, zero) == doctest::Approx(cycle_count(centred, 2)).epsilon(1e-12));
    CHECK(decomposed_cycle_count(Eigen::MatrixXd::Zero(5, 6), 1, 0, zero) == doctest::Approx(-std::sqrt(30.0)));
    CHECK_THROWS_AS(block_means(a, 1), DomainError);
    CHECK_THROWS_AS(block_means(a, 6), DomainError);
  }

  TEST_CASE("weighted count") {
    const double b = -0.4;
    const double x = 2 * b;
    double tail = 0.0;
    for (int k = 1; k <= 3; ++k) tail += std::pow(x, 2 * k) / (4.0 * k);
    CHECK(weighted_count({0, 0, 0}, b, 3) == doctest::Approx(-tail).epsilon(1e-14));
    CHECK(weighted_count({x, x * x, x * x * x}, b, 3) == doctest::Approx(tail).epsilon(1e-14));
    CHECK(weighted_count({x, x * x, x * x * x}, b, 3) + weighted_tail_bound(b, 3) ==
          doctest::Approx(-0.25 * std::log(1.0 - 4.0 * b * b)).epsilon(1e-12));
    CHECK_THROWS_AS(weighted_count({0.0}, b, 2), DomainError);
  }

  TEST_CASE("cycle vector and shift") {
    const double b = beta(1.0);
    const auto mu = shift_vector(b, 3);
    for (int k = 1; k < 3; ++k) CHECK(std::abs(mu(k) / mu(k - 1)) < std::abs(2 * b));
    const auto cv = CycleVector::from_counts({0.3, -1.2, 0.7}, b);
    CHECK(cv.order == 3);
    CHECK(std::abs(cv.y - weighted_count(cv.c, b, 3)) < 1e-12);
    CHECK(cv.v(1) == doctest::Approx(-1.2 / 2.0));
  }

  TEST_CASE("small planted experiment runs and is deterministic") {
    const CycleExperiment exp{PlantedKind::pair(0), 40, 72, 1.0};
    const auto a = cycle_samples(exp, 2, 30, 9, 1);
    const auto b = cycle_samples(exp, 2, 30, 9, 3);
    CHECK(a == b);
    CHECK(a.rows() == 30);
    CHECK(a.cols() == 2);
    const auto clt = clt_diagnostic(a, exp.kind, beta(1.0));
    CHECK(clt.ks.size() == 2);
    CHECK(clt.correlation.rows() == 2);
    CHECK(clt.correlation(0, 0) == doctest::Approx(1.0));
    CHECK(planted_shift_multiple(PlantedKind::null()) == 0.0);
    CHECK(planted_shift_multiple(PlantedKind::single()) == 1.0);
    CHECK(planted_shift_multiple(PlantedKind::pair(0)) == 2.0);
    CHECK_THROWS_AS((CycleExperiment{PlantedKind::pair(1), 40, 72, 1.0}.validate()), DomainError);
  }
}
