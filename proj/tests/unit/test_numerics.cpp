#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "ptl/errors.hpp"
#include "ptl/parallel.hpp"
#include "ptl/quadrature.hpp"
#include "ptl/rng.hpp"
#include "ptl/stats.hpp"

using namespace ptl;

TEST_SUITE("numerics") {
  TEST_CASE("adaptive quadrature") {
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) == doctest::Approx(2.0).epsilon(1e-13));
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(integrate([](double x) { return std::exp(-x * x); }, -inf, inf) ==
          doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
    QuadratureConfig bad;
    bad.hermite_nodes = 4;
    CHECK_THROWS_AS(bad.validate(), DomainError);
  }

  TEST_CASE("Gauss-Hermite rule") {
    const auto& rule = gauss_hermite(64);
    REQUIRE(rule.nodes.size() == 64);
    CHECK(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
    // Moments of N(mean, var).
    CHECK(gaussian_expectation([](double x) { return x; }, 0.3, 2.0, 64) == doctest::Approx(0.3).epsilon(1e-13));
    CHECK(gaussian_expectation([](double x) { return x * x; }, 0.3, 2.0, 64) == doctest::Approx(2.09).epsilon(1e-13));
    CHECK(gaussian_expectation([](double x) { return std::exp(x); }, -0.5, 1.0, 64) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gaussian_expectation([](double x) { return x * x; }, 1.5, 0.0, 64) == 2.25);
  }

  TEST_CASE("split seeds are distinct and deterministic") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t parent : {0ULL, 1ULL, 2ULL, 12345ULL})
      for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(split_seed(parent, i));
    CHECK(seen.size() == 4000);
    static_assert(split_seed(1, 2) == split_seed(1, 2));
    CHECK(split_seed(1, 0) != 0);
  }

  TEST_CASE("normal stream moments") {
    NormalStream s(99);
    RunningMoments acc;
    for (int i = 0; i < 200000; ++i) acc.push(s());
    CHECK(std::abs(acc.mean) < 4.0 * acc.se_mean());
    CHECK(acc.variance() == doctest::Approx(1.0).epsilon(0.02));
  }

  TEST_CASE("running moments merge matches a single pass") {
    std::vector<double> xs;
    for (int i = 0; i < 101; ++i) xs.push_back(std::sin(i * 0.7) * 3.0 + i * 0.01);
    RunningMoments all, a, b, c;
    for (double x : xs) all.push(x);
    for (int i = 0; i < 30; ++i) a.push(xs[i]);
    for (int i = 30; i < 70; ++i) b.push(xs[i]);
    for (int i = 70; i < 101; ++i) c.push(xs[i]);
    RunningMoments abc = a;
    abc.merge(b).merge(c);
    RunningMoments cba = c;
    cba.merge(b).merge(a);
    CHECK(abc.mean == doctest::Approx(all.mean).epsilon(1e-13));
    CHECK(abc.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
    CHECK(cba.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
    const auto s = summarize(xs);
    CHECK(s.variance == doctest::Approx(all.variance()).epsilon(1e-12));
  }

  TEST_CASE("KS statistic") {
    CHECK(ks_statistic({0.5}, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.5));
    std::vector<double> grid;
    for (int i = 0; i < 1000; ++i) grid.push_back((i + 0.5) / 1000.0);
    CHECK(ks_statistic(grid, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.0005));
    // Tied samples: the empirical CDF jumps from 0 to 1 at 0.5.
    CHECK(ks_statistic({0.5, 0.5}, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.5));
  }

  TEST_CASE("normal cdf conventions") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.0, 1.0, 4.0) == 0.5);
    CHECK(normal_cdf(2.0, 0.0, 4.0) == doctest::Approx(normal_cdf(1.0)).epsilon(1e-15));
    CHECK(normal_cdf(-0.1, 0.0, 0.0) == 0.0);
    CHECK(normal_cdf(0.0, 0.0, 0.0) == 1.0);
  }

  TEST_CASE("parallel trials are independent of thread count") {
    auto job = [](std::size_t i, std::uint64_t seed) {
      NormalStream s(seed);
      double acc = 0.0;
      for (int r = 0; r < 100; ++r) acc += s();
      return acc + static_cast<double>(i);
    };
    const auto one = parallel_trials(257, 1, 42, job);
    const auto many = parallel_trials(257, 8, 42, job);
    CHECK(one == many);
    for (std::size_t i = 0; i < one.size(); ++i) {
      NormalStream s(split_seed(42, i));
      double acc = 0.0;
      for (int r = 0; r < 100; ++r) acc += s();
      CHECK(one[i] == acc + static_cast<double>(i));
    }
  }

  TEST_CASE("parallel reduce") {
    auto job = [](std::size_t i, std::uint64_t) { return static_cast<long>(i); };
    auto add = [](long a, long b) { return a + b; };
    CHECK(parallel_reduce(1, 4, 3, job, 0L, add) == 0);
    CHECK(parallel_reduce(100, 1, 3, job, 0L, add) == parallel_reduce(100, 6, 3, job, 0L, add));
    // Disjoint trial ranges merged in any order give the same aggregate.
    auto range = [&](long lo, long hi) {
      RunningMoments r;
      for (long i = lo; i < hi; ++i) r.push(std::sin(static_cast<double>(i)));
      return r;
    };
    RunningMoments x = range(0, 10), y = range(10, 25), z = range(25, 40);
    RunningMoments xyz = x, zxy = z;
    xyz.merge(y).merge(z);
    zxy.merge(x).merge(y);
    CHECK(xyz.mean == doctest::Approx(zxy.mean).epsilon(1e-14));
    CHECK(xyz.variance() == doctest::Approx(zxy.variance()).epsilon(1e-13));
  }

  TEST_CASE("worker exceptions propagate") {
    auto job = [](std::size_t i, std::uint64_t) -> int {
      if (i == 17) throw NumericalInstability("boom");
      return 0;
    };
    CHECK_THROWS_AS(parallel_trials(100, 4, 1, job), NumericalInstability);
    CHECK_THROWS_AS(parallel_trials(100, 1, 1, job), NumericalInstability);
  }
}
