#include "coedit/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coedit/error.hpp"

namespace coedit {

Eigenbasis::Eigenbasis(std::size_t order) : order_(order) {
  if (order < 2) throw ArgumentError("eigenbasis order must be at least 2");
}

double Eigenbasis::operator()(std::size_t k, std::size_t j) const {
  if (k >= order_ || j >= order_) throw ArgumentError("eigenbasis index out of range");
  if (j == 0) return 1.0 / std::sqrt(static_cast<double>(order_));
  // 1-based column index jj = j + 1.
  const double jj = static_cast<double>(j + 1);
  const double norm = std::sqrt(jj * (jj - 1.0));
  if (k < j) return -1.0 / norm;
  if (k == j) return (jj - 1.0) / norm;
  return 0.0;
}

std::vector<double> Eigenbasis::column(std::size_t j) const {
  std::vector<double> out(order_);
  for (std::size_t k = 0; k < order_; ++k) out[k] = (*this)(k, j);
  return out;
}

std::vector<double> Eigenbasis::apply(std::span<const double> z) const {
  if (z.size() != order_) throw ArgumentError("vector length does not match eigenbasis order");
  const std::size_t n = order_;
  // w_j = z_j / sqrt(j(j-1)); x_k = z_1/sqrt(n) + (k-1) w_k - sum_{j>k} w_j.
  std::vector<double> w(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    const double jj = static_cast<double>(j + 1);
    w[j] = z[j] / std::sqrt(jj * (jj - 1.0));
  }
  std::vector<double> x(n);
  const double base = z[0] / std::sqrt(static_cast<double>(n));
  double tail = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    x[k] = base + static_cast<double>(k) * w[k] - tail;
    tail += w[k];
  }
  return x;
}

std::vector<double> Eigenbasis::apply_transpose(std::span<const double> x) const {
  if (x.size() != order_) throw ArgumentError("vector length does not match eigenbasis order");
  const std::size_t n = order_;
  std::vector<double> z(n);
  double prefix = 0.0;
  double total = 0.0;
  for (double v : x) total += v;
  z[0] = total / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) {
      const double jj = static_cast<double>(j + 1);
      z[j] = ((jj - 1.0) * x[j] - prefix) / std::sqrt(jj * (jj - 1.0));
    }
    prefix += x[j];
  }
  return z;
}

Eigenbasis eigenbasis(std::size_t n) { return Eigenbasis(n); }

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw ArgumentError("solver tolerance must be positive");
  if (max_iterations < 1) throw ArgumentError("max_iterations must be at least 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw ArgumentError("damping must lie in (0, 1]");
}

std::vector<double> spectral_coordinates(const GameInstance& game) {
  const auto feasible = feasibility(game);
  for (std::size_t i = 0; i < feasible.size(); ++i) {
    if (!feasible[i]) {
      throw PreconditionError("contributor '" + game.profiles()[i].contributor_id +
                              "' is infeasible; the spectral route solves the unconstrained "
                              "system only (use iterative exclusion first)");
    }
  }
  const std::size_t n = game.size();
  const double nn = static_cast<double>(n);
  // 1/alpha_j = t + L beta_j, G = sum_j 1/alpha_j.
  std::vector<double> inv_alpha(n);
  for (std::size_t j = 0; j < n; ++j) inv_alpha[j] = game.unit_cost(j);
  double g = 0.0;
  for (double v : inv_alpha) g += v;

  std::vector<double> z(n);
  z[0] = (nn - 1.0) / (std::sqrt(nn) * g);
  // z_k / sqrt(k(k-1)) = (N-1)^2 / (k(k-1)) G^-1 [1 - G^-1 (k/alpha_k + sum_{j>k} 1/alpha_j)]
  double suffix = 0.0;
  for (std::size_t idx = n; idx-- > 1;) {
    const double k = static_cast<double>(idx + 1);
    const double kk = k * (k - 1.0);
    const double bracket = 1.0 - (k * inv_alpha[idx] + suffix) / g;
    const double scaled = (nn - 1.0) * (nn - 1.0) / kk / g * bracket;
    z[idx] = scaled * std::sqrt(kk);
    suffix += inv_alpha[idx];
  }
  return z;
}

EquilibriumSolution spectral_equilibrium(const GameInstance& game) {
  const auto z = spectral_coordinates(game);
  EquilibriumSolution sol;
  sol.solver = SolverKind::spectral;
  sol.contributions = Eigenbasis(game.size()).apply(z);
  for (double& x : sol.contributions) x = std::max(x, 0.0);
  sol.ownership = fractional_ownership(sol.contributions);
  sol.feasible.assign(game.size(), true);
  for (std::size_t i = 0; i < game.size(); ++i) {
    if (sol.contributions[i] > 0.0) sol.active_set.push_back(i);
  }
  return sol;
}

namespace {

double others_total(std::span<const double> alloc, std::size_t i) {
  double s = 0.0;
  for (std::size_t j = 0; j < alloc.size(); ++j) {
    if (j != i) s += alloc[j];
  }
  return s;
}

double reply(double others, double unit_cost) {
  return std::max(std::sqrt(others / unit_cost) - others, 0.0);
}

}  // namespace

double best_response_step(const GameInstance& game, std::span<const double> alloc, std::size_t i) {
  if (alloc.size() != game.size()) {
    throw ArgumentError("allocation length does not match contributor count");
  }
  if (i >= game.size()) throw ArgumentError("contributor index out of range");
  const double others = others_total(alloc, i);
  if (!(others > 0.0)) {
    throw DegenerateOpponentsError(
        "best response is unbounded when every other contributor is at zero; seed strictly "
        "positive allocations");
  }
  return reply(others, game.unit_cost(i));
}

double marginal_utility(const GameInstance& game, std::span<const double> alloc, std::size_t i) {
  const double others = others_total(alloc, i);
  const double total = others + alloc[i];
  if (!(total > 0.0)) throw UndefinedOwnershipError("marginal utility undefined at zero total");
  return others / (total * total) - game.unit_cost(i);
}

EquilibriumSolution best_response_equilibrium(const GameInstance& game, const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t n = game.size();
  const double mean_cost = game.total_unit_cost() / static_cast<double>(n);
  std::vector<double> x(n, 1.0 / (static_cast<double>(n) * mean_cost));
  std::vector<double> next(n);
  std::vector<double> cost(n);
  for (std::size_t i = 0; i < n; ++i) cost[i] = game.unit_cost(i);

  // Synchronous updates oscillate once the opponent count grows; the step
  // weight is halved whenever the update size stops shrinking.
  double damping = cfg.damping;
  double previous_change = HUGE_VAL;
  double change = HUGE_VAL;
  std::size_t iter = 0;
  for (; iter < cfg.max_iterations; ++iter) {
    double total = 0.0;
    for (double v : x) total += v;
    change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double others = total - x[i];
      if (!(others > 0.0)) {
        throw DegenerateOpponentsError("best-response iteration reached an all-zero opponent set");
      }
      next[i] = (1.0 - damping) * x[i] + damping * reply(others, cost[i]);
      change = std::max(change, std::abs(next[i] - x[i]));
    }
    x.swap(next);
    change /= *std::max_element(x.begin(), x.end());
    if (change < cfg.tolerance) break;
    if (change > previous_change && damping > 1e-3) damping *= 0.5;
    previous_change = change;
  }
  if (!(change < cfg.tolerance)) {
    throw ConvergenceError("best-response iteration did not converge; residual " +
                               std::to_string(change),
                           change, iter);
  }

  // Contributors whose reply is exactly zero sit on the boundary; their
  // residual geometric tail is snapped to zero.
  double total = 0.0;
  for (double v : x) total += v;
  for (std::size_t i = 0; i < n; ++i) {
    if (reply(total - x[i], cost[i]) == 0.0) x[i] = 0.0;
  }

  EquilibriumSolution sol;
  sol.solver = SolverKind::best_response;
  sol.contributions = x;
  sol.ownership = fractional_ownership(x);
  sol.feasible.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sol.feasible[i] = x[i] > 0.0;
    if (x[i] > 0.0) sol.active_set.push_back(i);
  }
  return sol;
}

}  // namespace coedit
