#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coedit/error.hpp"
#include "coedit/governance.hpp"
#include "oracles.hpp"

using namespace coedit;

namespace {

std::vector<ContributorProfile> profiles_of(const GameInstance& game) { return game.profiles(); }

std::vector<ContributorProfile> from_betas(std::vector<double> betas) {
  return GameInstance::from_betas(betas).profiles();
}

}  // namespace

TEST_CASE("entropy values") {
  CHECK(entropy(std::vector<double>{0.5, 0.5}, false) == doctest::Approx(std::log(2.0)));
  CHECK(entropy(std::vector<double>{0.5, 0.5}, true) == doctest::Approx(1.0));
  CHECK(entropy(std::vector<double>{1.0, 0.0}, false) == 0.0);
  CHECK(entropy(std::vector<double>{1.0, 0.0}, true) == 0.0);
  CHECK(entropy(std::vector<double>(4, 0.25), false) == doctest::Approx(std::log(4.0)));
  CHECK(entropy(std::vector<double>(4, 0.25), true) == doctest::Approx(1.0));
  CHECK_THROWS_AS(entropy(std::vector<double>{0.5, 0.4}, false), ArgumentError);
  CHECK_THROWS_AS(entropy(std::vector<double>{1.5, -0.5}, false), ArgumentError);
}

TEST_CASE("normalized entropy stays in the unit interval") {
  Rng rng(4);
  for (int k = 0; k < 300; ++k) {
    const auto game = oracle::random_instance(rng, 2, 40, 8.4, 10.0);
    const double h = entropy(equilibrium_ownership(game), true);
    CHECK(h >= 0.0);
    CHECK(h <= 1.0 + 1e-12);
  }
}

TEST_CASE("entropy along governance") {
  const auto sym = from_betas({3.0, 3.0, 3.0});
  for (double t : {0.0, 1.0, 50.0}) CHECK(entropy_at(sym, 1.0, t, true) == doctest::Approx(1.0));

  const auto skew = from_betas({1.0, 1.0, 10.0});
  CHECK(entropy_at(skew, 1.0, 100.0) > entropy_at(skew, 1.0, 0.0));
  CHECK(entropy_at(skew, 1.0, 0.0) == doctest::Approx(std::log(2.0)));
  CHECK(entropy_at(skew, 1.0, 1e6 * 12.0, true) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("ownership gradient") {
  const auto sym = from_betas({2.0, 2.0, 2.0, 2.0});
  for (double g : ownership_gradient(sym, 1.0, 0.5)) CHECK(g == 0.0);
  CHECK(entropy_gradient(sym, 1.0, 0.5) == doctest::Approx(0.0));

  CHECK_THROWS_AS(ownership_gradient(from_betas({1.0, 1.0, 10.0}), 1.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(entropy_gradient(from_betas({1.0, 1.0, 10.0}), 1.0, 0.0), PreconditionError);
}

TEST_CASE("gradients match central differences") {
  Rng rng(1234);
  const double h = 1e-5;
  for (int k = 0; k < 200; ++k) {
    const auto drawn = oracle::feasible_instance(rng, 2, 30, 8.4, 10.0);
    const auto game = drawn.with_governance(std::max(drawn.governance(), 1e-3));
    const auto profiles = profiles_of(game);
    const double t = game.governance();
    const auto grad = ownership_gradient(profiles, 1.0, t);

    const double total = std::accumulate(grad.begin(), grad.end(), 0.0);
    CHECK(std::abs(total) < 1e-12);

    const auto up = equilibrium_ownership(game.with_governance(t + h));
    const auto down = equilibrium_ownership(game.with_governance(t - h));
    const double span = 2.0 * h;
    double scale = 0.0;
    for (double g : grad) scale = std::max(scale, std::abs(g));
    for (std::size_t i = 0; i < grad.size(); ++i) {
      const double fd = (up[i] - down[i]) / span;
      const double denom = std::max(std::abs(grad[i]), 1e-3 * scale);
      if (denom == 0.0) {
        CHECK(std::abs(fd) < 1e-9);
      } else {
        CHECK(std::abs(fd - grad[i]) / denom < 1e-5);
      }
    }

    const double dh = entropy_gradient(profiles, 1.0, t);
    const auto ent = [&](double at) { return entropy_at(profiles, 1.0, at); };
    // fourth-order stencil; the plain central difference loses accuracy when
    // the terms of dH/dt nearly cancel
    const double fd_h = (ent(t - 2 * h) - 8 * ent(t - h) + 8 * ent(t + h) - ent(t + 2 * h)) / (12 * h);
    if (std::abs(dh) > 1e-12) CHECK(std::abs(fd_h - dh) / std::abs(dh) < 1e-5);
  }
}

TEST_CASE("entropy rises with governance for spread-out edit sizes") {
  const auto profiles = from_betas({4.0, 5.0, 6.0, 7.0});
  for (double t : {0.5, 2.0, 10.0}) CHECK(entropy_gradient(profiles, 1.0, t) > 0.0);
}

TEST_CASE("search validation") {
  GovernanceSearch s;
  s.z_star = 0.0;
  CHECK_THROWS_AS(s.validate(), ArgumentError);
  s.z_star = 2.0;
  CHECK(s.effective_tolerance() == doctest::Approx(2e-6));
  s.grid_points = 1;
  CHECK_THROWS_AS(s.validate(), ArgumentError);
}

TEST_CASE("symmetric profile resolves to zero governance") {
  GovernanceSearch s;
  s.z_star = 5.0;
  const auto out = optimal_governance(from_betas({2.0, 2.0, 2.0}), 1.0, s);
  CHECK(out.argmax_t == 0.0);
  CHECK(!out.constrained);
  CHECK(out.max_entropy == doctest::Approx(1.0));
}

TEST_CASE("monotone entropy puts the optimum on the boundary") {
  Rng rng(55);
  int boundary = 0;
  for (int k = 0; k < 100; ++k) {
    const auto game = oracle::random_instance(rng, 2, 20, 8.4, 0.0);
    GovernanceSearch s;
    s.z_star = rng.uniform(0.5, 50.0);
    const auto out = optimal_governance(game.profiles(), 1.0, s);
    REQUIRE(out.grid.size() == s.grid_points);
    for (std::size_t g = 1; g < out.grid.size(); ++g) CHECK(out.grid[g].first > out.grid[g - 1].first);
    CHECK(out.grid.front().first == 0.0);
    CHECK(out.grid.back().first == s.z_star);
    CHECK(out.argmax_t >= 0.0);
    CHECK(out.argmax_t <= s.z_star);
    if (out.grid_non_decreasing) {
      CHECK(std::abs(out.argmax_t - s.z_star) <= s.effective_tolerance());
      CHECK(out.constrained);
      ++boundary;
    }
  }
  CHECK(boundary > 0);
}

TEST_CASE("tiny bound collapses the search") {
  GovernanceSearch s;
  s.z_star = 1e-9;
  const auto out = optimal_governance(from_betas({1.0, 3.0, 5.0}), 1.0, s);
  CHECK(out.argmax_t <= 1e-9);
}
