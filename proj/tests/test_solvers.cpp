#include <doctest.h>

#include <cmath>
#include <numeric>

#include "coedit/error.hpp"
#include "coedit/solvers.hpp"
#include "oracles.hpp"

using namespace coedit;

TEST_CASE("eigenbasis entries") {
  const auto p2 = eigenbasis(2);
  const double r2 = 1.0 / std::sqrt(2.0);
  CHECK(p2(0, 0) == doctest::Approx(r2));
  CHECK(p2(1, 0) == doctest::Approx(r2));
  CHECK(p2(0, 1) == doctest::Approx(-r2));
  CHECK(p2(1, 1) == doctest::Approx(r2));

  const auto p3 = eigenbasis(3);
  const auto y2 = p3.column(1);
  const auto y3 = p3.column(2);
  CHECK(y2[0] == doctest::Approx(-r2));
  CHECK(y2[1] == doctest::Approx(r2));
  CHECK(y2[2] == 0.0);
  CHECK(y3[0] == doctest::Approx(-1.0 / std::sqrt(6.0)));
  CHECK(y3[1] == doctest::Approx(-1.0 / std::sqrt(6.0)));
  CHECK(y3[2] == doctest::Approx(2.0 / std::sqrt(6.0)));

  CHECK_THROWS_AS(eigenbasis(1), ArgumentError);
}

TEST_CASE("eigenbasis is orthonormal and diagonalizes the ones matrix") {
  for (std::size_t n : {2u, 3u, 7u, 64u, 500u}) {
    const auto p = eigenbasis(n);
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < n; ++j) cols.push_back(p.column(j));
    const std::size_t stride = n > 100 ? 37 : 1;
    for (std::size_t i = 0; i < n; i += stride) {
      for (std::size_t j = 0; j < n; ++j) {
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) dot += cols[i][k] * cols[j][k];
        REQUIRE(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-12);
      }
    }
    // P^T 1 1^T P = (P^T 1)(P^T 1)^T
    std::vector<double> sums(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) sums[j] += cols[j][k];
    }
    for (std::size_t i = 0; i < n; i += stride) {
      for (std::size_t j = 0; j < n; ++j) {
        const double expected = (i == 0 && j == 0) ? static_cast<double>(n) : 0.0;
        REQUIRE(std::abs(sums[i] * sums[j] - expected) < 1e-10);
      }
    }
  }
}

TEST_CASE("eigenbasis apply round trips") {
  Rng rng(3);
  for (std::size_t n : {2u, 5u, 40u}) {
    const auto p = eigenbasis(n);
    std::vector<double> z(n);
    for (auto& v : z) v = rng.uniform(-1, 1);
    const auto x = p.apply(z);
    for (std::size_t k = 0; k < n; ++k) {
      double direct = 0.0;
      for (std::size_t j = 0; j < n; ++j) direct += p(k, j) * z[j];
      CHECK(x[k] == doctest::Approx(direct).epsilon(1e-12));
    }
    const auto back = p.apply_transpose(x);
    for (std::size_t j = 0; j < n; ++j) CHECK(back[j] == doctest::Approx(z[j]).scale(1.0));
  }
}

TEST_CASE("spectral route") {
  const auto game = GameInstance::from_betas(std::vector<double>{1.0, 2.0});
  const auto sol = spectral_equilibrium(game);
  CHECK(sol.contributions[0] == doctest::Approx(2.0 / 9).epsilon(1e-14));
  CHECK(sol.contributions[1] == doctest::Approx(1.0 / 9).epsilon(1e-14));
  CHECK(sol.solver == SolverKind::spectral);

  const auto sym = GameInstance::from_betas(std::vector<double>{4.0, 4.0, 4.0, 4.0}, 1.0, 2.0);
  const auto z = spectral_coordinates(sym);
  for (std::size_t k = 1; k < z.size(); ++k) CHECK(std::abs(z[k]) < 1e-15);

  CHECK_THROWS_AS(spectral_equilibrium(GameInstance::from_betas(std::vector<double>{1.0, 1.0, 10.0})),
                  PreconditionError);
}

TEST_CASE("spectral route matches the KKT oracle") {
  Rng rng(77);
  for (int k = 0; k < 300; ++k) {
    const auto game = oracle::feasible_instance(rng, 2, 50, 8.4, 10.0);
    const auto sol = spectral_equilibrium(game);
    const auto ref = oracle::kkt_equilibrium(oracle::unit_costs(game));
    for (std::size_t i = 0; i < game.size(); ++i) {
      REQUIRE(std::abs(sol.contributions[i] - ref[i]) < 1e-9);
    }
  }
}

TEST_CASE("best response step") {
  const auto game = GameInstance::from_betas(std::vector<double>{1.0, 2.0});
  // opponent plays 1/9, unit cost 1
  CHECK(best_response_step(game, std::vector<double>{0.5, 1.0 / 9}, 0) ==
        doctest::Approx(2.0 / 9).epsilon(1e-14));
  // sigma = 1/a: indifference
  CHECK(best_response_step(game, std::vector<double>{0.3, 1.0}, 0) == doctest::Approx(0.0));
  CHECK(best_response_step(game, std::vector<double>{0.3, 2.0}, 0) == 0.0);
  CHECK_THROWS_AS(best_response_step(game, std::vector<double>{0.3, 0.0}, 0),
                  DegenerateOpponentsError);
}

TEST_CASE("best response equilibrium") {
  const auto pair = best_response_equilibrium(GameInstance::from_betas(std::vector<double>{1.0, 2.0}));
  CHECK(pair.contributions[0] == doctest::Approx(2.0 / 9).epsilon(1e-9));
  CHECK(pair.contributions[1] == doctest::Approx(1.0 / 9).epsilon(1e-9));
  CHECK(pair.solver == SolverKind::best_response);

  const auto priced = best_response_equilibrium(GameInstance::from_betas(std::vector<double>{1.0, 1.0, 10.0}));
  CHECK(priced.contributions[2] == 0.0);
  CHECK(priced.active_set == std::vector<std::size_t>{0, 1});

  const auto sym = best_response_equilibrium(GameInstance::from_betas(std::vector<double>(5, 3.0)));
  for (double x : sym.contributions) CHECK(x == doctest::Approx(sym.contributions[0]).epsilon(1e-12));
}

TEST_CASE("best response reports non-convergence") {
  SolverConfig cfg;
  cfg.max_iterations = 2;
  try {
    best_response_equilibrium(GameInstance::from_betas(std::vector<double>{1.0, 2.0, 3.5}), cfg);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.iterations() == 2);
    CHECK(e.residual() > 0.0);
  }
  cfg = {};
  cfg.tolerance = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
}

TEST_CASE("best response fixed point and concavity") {
  Rng rng(8);
  for (int k = 0; k < 100; ++k) {
    const auto game = oracle::random_instance(rng, 2, 30, 8.4, 10.0);
    const auto sol = best_response_equilibrium(game);
    const auto ref = oracle::kkt_equilibrium(oracle::unit_costs(game));
    const double total = std::accumulate(sol.contributions.begin(), sol.contributions.end(), 0.0);
    for (std::size_t i = 0; i < game.size(); ++i) {
      REQUIRE(std::abs(sol.contributions[i] - ref[i]) < 1e-9);
      CHECK(std::abs(best_response_step(game, sol.contributions, i) - sol.contributions[i]) < 1e-10);
      if (sol.contributions[i] == 0.0) {
        CHECK(marginal_utility(game, sol.contributions, i) <= 1e-12);
      } else {
        const double others = total - sol.contributions[i];
        CHECK(-2.0 * others / (total * total * total) < 0.0);
      }
    }
  }
}
