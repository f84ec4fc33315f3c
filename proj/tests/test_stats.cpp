#include <doctest.h>

#include <cmath>
#include <numeric>

#include "coedit/error.hpp"
#include "coedit/random.hpp"
#include "coedit/stats.hpp"
#include "oracles.hpp"

using namespace coedit;

TEST_CASE("pearson examples") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  CHECK(pearson(x, std::vector<double>{2, 4, 6, 8, 10}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(x, std::vector<double>{5, 4, 3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(pearson(x, std::vector<double>{1, 3, 2, 5, 4}) == doctest::Approx(0.8));
  CHECK_THROWS_AS(pearson(x, std::vector<double>{3, 3, 3, 3, 3}), StatisticsError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1.0}, std::vector<double>{1.0}), ArgumentError);
  CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), ArgumentError);
}

TEST_CASE("pearson agrees with the two-pass oracle and is affine invariant") {
  Rng rng(17);
  for (int k = 0; k < 500; ++k) {
    const auto n = rng.uniform_int(3, 200);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal(1e3, 5.0);
      y[i] = 0.3 * x[i] + rng.normal(0.0, 2.0);
    }
    const double r = pearson(x, y);
    REQUIRE(std::abs(r - oracle::pearson_two_pass(x, y)) < 1e-10);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
    std::vector<double> shifted(n);
    for (std::size_t i = 0; i < n; ++i) shifted[i] = 7.0 * y[i] - 400.0;
    CHECK(std::abs(pearson(x, shifted) - r) < 1e-10);
    for (std::size_t i = 0; i < n; ++i) shifted[i] = -2.0 * y[i];
    CHECK(std::abs(pearson(x, shifted) + r) < 1e-10);
  }
}

TEST_CASE("linear fit recovers exact lines") {
  const std::vector<double> a = {0.1, 0.2, 0.4, 0.7};
  std::vector<double> d;
  for (double v : a) d.push_back(0.8 * v + 0.05);
  const auto fit = linear_fit(a, d);
  CHECK(fit.rho == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(fit.delta == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(fit.mean_abs_error < 1e-12);
  CHECK(fit.n == 4);
  CHECK(fit.p_value < 1e-6);

  CHECK_THROWS_AS(linear_fit(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), StatisticsError);
  CHECK_THROWS_AS(linear_fit(std::vector<double>{1, 2}, std::vector<double>{1, 2}), ArgumentError);
  CHECK(mean_abs_error(std::vector<double>{0, 1}, std::vector<double>{1, 1}, 1.0, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("least-squares residuals are orthogonal to the regressors") {
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    const auto n = rng.uniform_int(3, 100);
    std::vector<double> a(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.uniform01();
      d[i] = rng.uniform01();
    }
    const auto fit = linear_fit(a, d);
    const auto r = residuals(a, d, fit);
    CHECK(std::abs(std::accumulate(r.begin(), r.end(), 0.0)) < 1e-10);
    CHECK(std::abs(std::inner_product(r.begin(), r.end(), a.begin(), 0.0)) < 1e-10);
    CHECK(fit.p_value >= 0.0);
    CHECK(fit.p_value <= 1.0);
  }
}

TEST_CASE("slope p-value matches a hand-computed t statistic") {
  const std::vector<double> a = {1, 2, 3, 4};
  const std::vector<double> d = {1, 3, 2, 4};
  const auto fit = linear_fit(a, d);
  CHECK(fit.rho == doctest::Approx(0.8));
  CHECK(fit.delta == doctest::Approx(0.5));
  // SSE = 1.8, s^2 = 0.9, Sxx = 5, se = sqrt(0.18)
  CHECK(fit.slope_stderr == doctest::Approx(std::sqrt(0.18)));
  // t = 0.8 / sqrt(0.18) = 1.8856 on 2 degrees of freedom: p = 1 - t/sqrt(2 + t^2)
  const double t = 0.8 / std::sqrt(0.18);
  CHECK(fit.p_value == doctest::Approx(1.0 - t / std::sqrt(2.0 + t * t)).epsilon(1e-10));
}

TEST_CASE("noisy slopes land within three standard errors") {
  int inside = 0;
  const int trials = 200;
  for (int s = 0; s < trials; ++s) {
    Rng rng(derive_seed(1000, static_cast<std::uint64_t>(s)));
    std::vector<double> a(60), d(60);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = rng.uniform(0.0, 0.3);
      d[i] = 0.9 * a[i] + 0.02 + rng.normal(0.0, 0.01);
    }
    const auto fit = linear_fit(a, d);
    if (std::abs(fit.rho - 0.9) <= 3.0 * fit.slope_stderr) ++inside;
  }
  // 3 sigma covers 99.7%; allow a couple of misses
  CHECK(inside >= trials - 4);
}
