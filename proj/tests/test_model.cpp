#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coedit/error.hpp"
#include "coedit/model.hpp"
#include "coedit/random.hpp"
#include "oracles.hpp"

using namespace coedit;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("game construction rejects invalid parameters") {
  CHECK_THROWS_AS(GameInstance::from_betas(std::vector<double>{5.0}), ArgumentError);
  CHECK_THROWS_AS(GameInstance::from_betas(std::vector<double>{1.0, 0.0}), ArgumentError);
  CHECK_THROWS_AS(GameInstance::from_betas(std::vector<double>{1.0, -2.0}), ArgumentError);
  CHECK_THROWS_AS(GameInstance::from_betas(std::vector<double>{1.0, 2.0}, 0.0), ArgumentError);
  CHECK_THROWS_AS(GameInstance::from_betas(std::vector<double>{1.0, 2.0}, 1.0, -1.0),
                  ArgumentError);
  CHECK_THROWS_AS(GameInstance({{"a", 1.0}, {"a", 2.0}}), ArgumentError);
  CHECK_THROWS_AS(GameInstance({{"a", 1.0}, {"b", 2.0}}, 1.0, 0.0, std::vector<double>{0.0}),
                  ArgumentError);
  CHECK_NOTHROW(GameInstance({{"a", 1.0}, {"b", 2.0}}, 1.0, 0.0, std::vector<double>{0.5, 0.0}));
}

TEST_CASE("net utility") {
  const auto sym = GameInstance::from_betas(std::vector<double>{1.0, 1.0});
  CHECK(net_utility(sym, std::vector<double>{0.5, 0.5}, 0) == doctest::Approx(0.0));

  const auto game = GameInstance::from_betas(std::vector<double>{1.0, 2.0});
  CHECK(net_utility(game, std::vector<double>{2.0 / 9, 1.0 / 9}, 0) ==
        doctest::Approx(4.0 / 9).epsilon(1e-14));

  const GameInstance fixed({{"a", 1.0}, {"b", 2.0}}, 1.0, 0.0, std::vector<double>{0.25, 0.0});
  CHECK(net_utility(fixed, std::vector<double>{0.0, 1.0}, 0) == doctest::Approx(-0.25));

  CHECK_THROWS_AS(net_utility(game, std::vector<double>{0.0, 0.0}, 0), UndefinedOwnershipError);
  CHECK_THROWS_AS(net_utility(game, std::vector<double>{1.0, 1.0}, 2), ArgumentError);
}

TEST_CASE("fractional ownership") {
  const auto quarter = fractional_ownership(std::vector<double>{1, 1, 1, 1});
  for (double c : quarter) CHECK(c == doctest::Approx(0.25));
  const auto thirds = fractional_ownership(std::vector<double>{2.0 / 9, 1.0 / 9});
  CHECK(thirds[0] == doctest::Approx(2.0 / 3));
  CHECK(thirds[1] == doctest::Approx(1.0 / 3));
  const auto single = fractional_ownership(std::vector<double>{0, 5});
  CHECK(single[0] == 0.0);
  CHECK(single[1] == 1.0);
  CHECK_THROWS_AS(fractional_ownership(std::vector<double>{0, 0}), UndefinedOwnershipError);
}

TEST_CASE("two-player equilibrium") {
  const auto game = GameInstance::from_betas(std::vector<double>{1.0, 2.0});
  const auto sol = closed_form_equilibrium(game);
  CHECK(sol.contributions[0] == doctest::Approx(2.0 / 9).epsilon(1e-14));
  CHECK(sol.contributions[1] == doctest::Approx(1.0 / 9).epsilon(1e-14));
  CHECK(sol.ownership[0] == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(sol.ownership[1] == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(sol.active_set == std::vector<std::size_t>{0, 1});
  CHECK(sol.solver == SolverKind::closed_form);

  const auto oracle = oracle::kkt_equilibrium(oracle::unit_costs(game));
  CHECK(sol.contributions[0] == doctest::Approx(oracle[0]).epsilon(1e-14));
  CHECK(sol.contributions[1] == doctest::Approx(oracle[1]).epsilon(1e-14));
}

TEST_CASE("symmetric games split ownership evenly") {
  for (double b : {0.1, 1.0, 7.5}) {
    for (double t : {0.0, 3.0}) {
      const auto game = GameInstance::from_betas(std::vector<double>{b, b, b}, 1.0, t);
      for (double c : equilibrium_ownership(game)) CHECK(c == doctest::Approx(1.0 / 3));
    }
  }
}

TEST_CASE("an expensive contributor is priced out") {
  const auto game = GameInstance::from_betas(std::vector<double>{1.0, 1.0, 10.0});
  CHECK(feasibility(game) == std::vector<bool>{true, true, false});
  CHECK(feasibility(game.with_governance(9.0)) == std::vector<bool>{true, true, true});

  const auto sol = closed_form_equilibrium(game);
  CHECK(sol.ownership[2] == 0.0);
  CHECK(sol.contributions[2] == 0.0);
  CHECK(sol.ownership[0] == doctest::Approx(0.5));
  CHECK(sol.active_set == std::vector<std::size_t>{0, 1});

  const auto clamp = closed_form_equilibrium(game, FeasibilityMode::clamp);
  CHECK(clamp.ownership[2] == 0.0);
  CHECK(sum(clamp.ownership) == doctest::Approx(1.0));
}

TEST_CASE("two contributors are always feasible") {
  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    const auto game = GameInstance::from_betas(
        std::vector<double>{rng.exponential(8.4) + 1e-6, rng.exponential(8.4) + 1e-6}, 1.0,
        rng.uniform(0, 10));
    CHECK(feasibility(game) == std::vector<bool>{true, true});
  }
}

TEST_CASE("closed form matches the KKT oracle on random games") {
  Rng rng(2024);
  for (int k = 0; k < 500; ++k) {
    const auto game = oracle::random_instance(rng, 2, 40, 8.4, 10.0);
    const auto sol = closed_form_equilibrium(game);
    const auto ref = oracle::kkt_equilibrium(oracle::unit_costs(game));
    for (std::size_t i = 0; i < game.size(); ++i) {
      REQUIRE(std::abs(sol.contributions[i] - ref[i]) <= 1e-12 * (1.0 + ref[i]));
      CHECK((sol.contributions[i] > 0.0) == (ref[i] > 0.0));
    }
    CHECK(sum(sol.ownership) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("stationarity holds for active contributors") {
  Rng rng(99);
  for (int k = 0; k < 300; ++k) {
    const auto game = oracle::random_instance(rng, 2, 50, 8.4, 10.0);
    const auto sol = closed_form_equilibrium(game);
    const double total = sum(sol.contributions);
    for (std::size_t i : sol.active_set) {
      const double others = total - sol.contributions[i];
      CHECK(std::abs(others / (total * total) - game.unit_cost(i)) < 1e-9);
    }
    for (std::size_t i = 0; i < game.size(); ++i) {
      if (sol.contributions[i] == 0.0) CHECK(1.0 / total - game.unit_cost(i) <= 1e-12);
    }
  }
}

TEST_CASE("total contribution identity") {
  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    const auto game = oracle::feasible_instance(rng, 2, 30, 8.4, 10.0);
    const auto sol = closed_form_equilibrium(game);
    const double n = static_cast<double>(game.size());
    CHECK(sum(sol.contributions) ==
          doctest::Approx((n - 1.0) / game.total_unit_cost()).epsilon(1e-12));
  }
  const auto pair = GameInstance::from_betas(std::vector<double>{1.0, 2.0});
  CHECK(sum(closed_form_equilibrium(pair).contributions) ==
        doctest::Approx(1.0 / pair.total_unit_cost()));
}

TEST_CASE("ownership decreases with edit size") {
  Rng rng(17);
  for (int k = 0; k < 200; ++k) {
    const auto game = oracle::random_instance(rng, 2, 30, 8.4, 5.0);
    for (auto mode : {FeasibilityMode::iterative_exclusion, FeasibilityMode::clamp}) {
      const auto c = equilibrium_ownership(game, mode);
      for (std::size_t i = 0; i < game.size(); ++i) {
        for (std::size_t j = 0; j < game.size(); ++j) {
          if (game.beta(i) < game.beta(j)) CHECK(c[i] >= c[j] - 1e-15);
        }
      }
    }
  }
}

TEST_CASE("scaling costs leaves ownership unchanged") {
  Rng rng(23);
  for (int k = 0; k < 100; ++k) {
    const auto game = oracle::random_instance(rng, 2, 20, 8.4, 5.0);
    std::vector<double> scaled;
    for (std::size_t i = 0; i < game.size(); ++i) scaled.push_back(3.5 * game.beta(i));
    const auto big = GameInstance::from_betas(scaled, 1.0, 3.5 * game.governance());
    const auto c1 = equilibrium_ownership(game);
    const auto c2 = equilibrium_ownership(big);
    for (std::size_t i = 0; i < c1.size(); ++i) CHECK(c1[i] == doctest::Approx(c2[i]).epsilon(1e-12));
  }
}

TEST_CASE("contributions eventually fall with governance") {
  Rng rng(31);
  for (int k = 0; k < 50; ++k) {
    const auto game = oracle::feasible_instance(rng, 2, 20, 8.4, 0.0);
    double beta_sum = 0.0;
    for (std::size_t i = 0; i < game.size(); ++i) beta_sum += game.beta(i);
    std::vector<double> prev;
    for (int step = 0; step <= 20; ++step) {
      const double t = beta_sum * (1.0 + step);
      const auto x = closed_form_equilibrium(game.with_governance(t)).contributions;
      if (!prev.empty()) {
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] < prev[i]);
      }
      prev = x;
    }
  }
}

TEST_CASE("clamp mode reproduces the positive-part formula") {
  Rng rng(41);
  for (int k = 0; k < 300; ++k) {
    const auto game = oracle::random_instance(rng, 2, 30, 8.4, 5.0);
    const double n1 = static_cast<double>(game.size() - 1);
    const double total = game.total_unit_cost();
    std::vector<double> raw;
    for (std::size_t i = 0; i < game.size(); ++i) {
      raw.push_back(std::max(0.0, 1.0 - n1 * game.unit_cost(i) / total));
    }
    const double norm = sum(raw);
    const auto c = equilibrium_ownership(game, FeasibilityMode::clamp);
    const auto feasible = feasibility(game);
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(c[i] == doctest::Approx(raw[i] / norm).epsilon(1e-12));
      if (!feasible[i]) CHECK(c[i] == 0.0);
    }
  }
}

TEST_CASE("exclusion can drop a contributor feasible in the full game") {
  const auto game = GameInstance::from_betas(std::vector<double>{1.0, 1.0, 2.0, 4.0});
  CHECK(feasibility(game) == std::vector<bool>{true, true, true, false});
  const auto sol = closed_form_equilibrium(game);
  CHECK(sol.active_set == std::vector<std::size_t>{0, 1});
  CHECK(sol.feasible == std::vector<bool>{true, true, false, false});
  CHECK(active_contributors(game) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("asymptotic ownership") {
  CHECK(asymptotic_ownership(8.4, 8.4, 1.0, 0.0) == 0.0);
  CHECK(asymptotic_ownership(9.0, 8.4, 1.0, 0.0) == 0.0);
  CHECK(asymptotic_ownership(4.0, 8.4, 1.0, 0.0) == doctest::Approx(4.4 / 8.4));
  CHECK(asymptotic_ownership(4.0, 8.4, 2.0, 1.0) == doctest::Approx(8.8 / 17.8));
}

TEST_CASE("ownership expression") {
  const auto flat = GameInstance::from_betas(std::vector<double>{2.0, 3.0, 4.0});
  const auto expr = ownership_expression(flat);
  const auto eq = equilibrium_ownership(flat);
  for (std::size_t i = 0; i < 3; ++i) CHECK(expr[i] == doctest::Approx(eq[i]).epsilon(1e-14));

  const auto game = GameInstance::from_betas(std::vector<double>{1.0, 1.0, 2.0, 4.0});
  CHECK(ownership_expression(game) == std::vector<double>{0.625, 0.625, 0.25, 0.0});

  // approaches the large-N limit as the cast grows
  Rng rng(41);
  std::vector<double> pool(2000);
  for (auto& b : pool) b = rng.exponential(8.4) + 1e-6;
  double previous = 1.0;
  for (std::size_t n : {20u, 200u, 2000u}) {
    const std::vector<double> betas(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
    const auto g = GameInstance::from_betas(betas);
    const auto c = ownership_expression(g);
    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dev = std::max(dev, std::abs(c[i] - asymptotic_ownership(betas[i], g.mean_beta(), 1.0, 0.0)));
    }
    CHECK(dev < previous);
    previous = dev;
  }
  CHECK(previous < 0.01);
}

TEST_CASE("feasibility mode names") {
  CHECK(parse_feasibility_mode("clamp") == FeasibilityMode::clamp);
  CHECK(parse_feasibility_mode("iterative-exclusion") == FeasibilityMode::iterative_exclusion);
  CHECK(to_string(FeasibilityMode::clamp) == "clamp");
  CHECK_THROWS_AS(parse_feasibility_mode("bogus"), ArgumentError);
}
