#pragma once

// Independent routes to the contributor-game equilibrium, used as oracles
// against the closed form in model.hpp.
//
//  * spectral: rotate the stationarity system into the eigenbasis of 11^T,
//    solve the rotated coordinates by backward substitution and map back.
//  * best response: damped synchronous iteration of each contributor's
//    utility-maximizing reply to the others.

#include <cstddef>
#include <span>
#include <vector>

#include "coedit/model.hpp"

namespace coedit {

/// Orthonormal eigenvectors of the all-ones matrix 11^T. Column 1 is
/// 1/sqrt(n) * 1; column j >= 2 has -1/sqrt(j(j-1)) above the diagonal
/// entry (j-1)/sqrt(j(j-1)) and zeros below.
class Eigenbasis {
 public:
  explicit Eigenbasis(std::size_t order);

  std::size_t order() const noexcept { return order_; }

  /// Entry (row k, column j), both 0-based.
  double operator()(std::size_t k, std::size_t j) const;
  std::vector<double> column(std::size_t j) const;

  /// P z.
  std::vector<double> apply(std::span<const double> z) const;
  /// P^T x.
  std::vector<double> apply_transpose(std::span<const double> x) const;

 private:
  std::size_t order_;
};

Eigenbasis eigenbasis(std::size_t n);

struct SolverConfig {
  double tolerance = 1e-14;       // on max |x_new - x_old| / max x
  std::size_t max_iterations = 100000;
  double damping = 0.5;           // weight of the new best response

  void validate() const;
};

/// Equilibrium through the rotated coordinates. Requires every contributor
/// to be feasible; throws PreconditionError otherwise.
EquilibriumSolution spectral_equilibrium(const GameInstance& game);

/// Rotated coordinates z with x* = P z, for an all-feasible game.
std::vector<double> spectral_coordinates(const GameInstance& game);

/// Contributor i's utility-maximizing contribution given the others:
/// max(0, sqrt(s / a_i) - s) with s = sum_{j != i} x_j and a_i = L beta_i + t.
double best_response_step(const GameInstance& game, std::span<const double> alloc, std::size_t i);

/// Damped synchronous best-response iteration from a uniform positive seed.
/// Throws ConvergenceError when max_iterations is exhausted.
EquilibriumSolution best_response_equilibrium(const GameInstance& game,
                                              const SolverConfig& cfg = {});

/// d u_i / d x_i = s / S^2 - a_i at `alloc`.
double marginal_utility(const GameInstance& game, std::span<const double> alloc, std::size_t i);

}  // namespace coedit
