#include "coedit/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include "coedit/error.hpp"

namespace coedit {

std::string_view to_string(FeasibilityMode mode) {
  switch (mode) {
    case FeasibilityMode::iterative_exclusion: return "iterative-exclusion";
    case FeasibilityMode::clamp: return "clamp";
  }
  return "unknown";
}

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::closed_form: return "closed_form";
    case SolverKind::spectral: return "spectral";
    case SolverKind::best_response: return "best_response";
  }
  return "unknown";
}

FeasibilityMode parse_feasibility_mode(std::string_view text) {
  if (text == "iterative-exclusion" || text == "exclusion") {
    return FeasibilityMode::iterative_exclusion;
  }
  if (text == "clamp") return FeasibilityMode::clamp;
  throw ArgumentError("unknown feasibility mode '" + std::string(text) + "'");
}

GameInstance::GameInstance(std::vector<ContributorProfile> profiles, double effort_constant,
                           double governance, std::optional<std::vector<double>> fixed_costs)
    : profiles_(std::move(profiles)),
      effort_constant_(effort_constant),
      governance_(governance) {
  if (profiles_.size() < 2) {
    throw ArgumentError("a game needs at least two contributors, got " +
                        std::to_string(profiles_.size()));
  }
  if (!(effort_constant_ > 0.0) || !std::isfinite(effort_constant_)) {
    throw ArgumentError("effort constant must be positive and finite");
  }
  if (!(governance_ >= 0.0) || !std::isfinite(governance_)) {
    throw ArgumentError("governance level must be non-negative and finite");
  }
  std::set<std::string_view> seen;
  for (const auto& p : profiles_) {
    if (!(p.beta > 0.0) || !std::isfinite(p.beta)) {
      throw ArgumentError("beta of contributor '" + p.contributor_id + "' must be positive");
    }
    if (!seen.insert(p.contributor_id).second) {
      throw ArgumentError("duplicate contributor id '" + p.contributor_id + "'");
    }
  }
  if (fixed_costs) {
    if (fixed_costs->size() != profiles_.size()) {
      throw ArgumentError("fixed cost list length does not match contributor count");
    }
    for (double f : *fixed_costs) {
      if (!(f >= 0.0)) throw ArgumentError("fixed costs must be non-negative");
    }
    fixed_costs_ = std::move(*fixed_costs);
  } else {
    fixed_costs_.assign(profiles_.size(), 0.0);
  }
}

GameInstance GameInstance::from_betas(std::span<const double> betas, double effort_constant,
                                      double governance) {
  std::vector<ContributorProfile> profiles;
  profiles.reserve(betas.size());
  for (std::size_t i = 0; i < betas.size(); ++i) {
    profiles.push_back({"c" + std::to_string(i + 1), betas[i]});
  }
  return GameInstance(std::move(profiles), effort_constant, governance);
}

double GameInstance::unit_cost(std::size_t i) const {
  return effort_constant_ * profiles_.at(i).beta + governance_;
}

double GameInstance::total_unit_cost() const noexcept {
  double total = 0.0;
  for (const auto& p : profiles_) total += effort_constant_ * p.beta + governance_;
  return total;
}

double GameInstance::mean_beta() const noexcept {
  double total = 0.0;
  for (const auto& p : profiles_) total += p.beta;
  return total / static_cast<double>(profiles_.size());
}

GameInstance GameInstance::with_governance(double t) const {
  return GameInstance(profiles_, effort_constant_, t, fixed_costs_);
}

GameInstance GameInstance::subgame(std::span<const std::size_t> indices) const {
  std::vector<ContributorProfile> profiles;
  std::vector<double> costs;
  profiles.reserve(indices.size());
  costs.reserve(indices.size());
  for (std::size_t i : indices) {
    profiles.push_back(profiles_.at(i));
    costs.push_back(fixed_costs_.at(i));
  }
  return GameInstance(std::move(profiles), effort_constant_, governance_, std::move(costs));
}

namespace {

double checked_total(std::span<const double> alloc) {
  double total = 0.0;
  for (double x : alloc) {
    if (!(x >= 0.0)) throw ArgumentError("allocations must be non-negative");
    total += x;
  }
  if (!(total > 0.0)) {
    throw UndefinedOwnershipError("ownership is undefined for a zero total contribution");
  }
  return total;
}

// Interior closed form over every contributor of `game`:
// x_i = (n-1) (A - (n-1) a_i) / A^2, c_i = 1 - (n-1) a_i / A.
struct Interior {
  std::vector<double> contributions;
  std::vector<double> ownership;
};

Interior interior_solution(const GameInstance& game) {
  const std::size_t n = game.size();
  const double m = static_cast<double>(n - 1);
  const double total = game.total_unit_cost();
  Interior out;
  out.contributions.resize(n);
  out.ownership.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = game.unit_cost(i);
    out.contributions[i] = m * (total - m * a) / (total * total);
    out.ownership[i] = 1.0 - m * a / total;
  }
  return out;
}

}  // namespace

double net_utility(const GameInstance& game, std::span<const double> alloc, std::size_t i) {
  if (alloc.size() != game.size()) {
    throw ArgumentError("allocation length does not match contributor count");
  }
  if (i >= game.size()) throw ArgumentError("contributor index out of range");
  const double total = checked_total(alloc);
  return alloc[i] / total - game.unit_cost(i) * alloc[i] - game.fixed_costs()[i];
}

std::vector<double> fractional_ownership(std::span<const double> alloc) {
  const double total = checked_total(alloc);
  std::vector<double> out(alloc.size());
  std::transform(alloc.begin(), alloc.end(), out.begin(), [total](double x) { return x / total; });
  return out;
}

std::vector<bool> feasibility(const GameInstance& game) {
  const std::size_t n = game.size();
  const double m = static_cast<double>(n - 1);
  const double l = game.effort_constant();
  double effort = 0.0;
  for (const auto& p : game.profiles()) effort += l * p.beta;
  std::vector<bool> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = m * l * game.beta(i) < effort + game.governance();
  }
  return out;
}

std::vector<std::size_t> active_contributors(const GameInstance& game) {
  std::vector<std::size_t> active(game.size());
  std::iota(active.begin(), active.end(), std::size_t{0});
  const double l = game.effort_constant();
  const double t = game.governance();
  while (active.size() > 2) {
    double effort = 0.0;
    for (std::size_t i : active) effort += l * game.beta(i);
    const double m = static_cast<double>(active.size() - 1);
    auto worst = active.end();
    for (auto it = active.begin(); it != active.end(); ++it) {
      const bool feasible = m * l * game.beta(*it) < effort + t;
      if (!feasible && (worst == active.end() || game.beta(*it) >= game.beta(*worst))) {
        worst = it;
      }
    }
    if (worst == active.end()) break;
    active.erase(worst);
  }
  return active;
}

EquilibriumSolution closed_form_equilibrium(const GameInstance& game, FeasibilityMode mode) {
  const std::size_t n = game.size();
  EquilibriumSolution sol;
  sol.solver = SolverKind::closed_form;
  sol.contributions.assign(n, 0.0);
  sol.ownership.assign(n, 0.0);
  sol.feasible.assign(n, false);

  if (mode == FeasibilityMode::iterative_exclusion) {
    const auto active = active_contributors(game);
    const auto reduced = interior_solution(game.subgame(active));
    for (std::size_t k = 0; k < active.size(); ++k) {
      sol.contributions[active[k]] = reduced.contributions[k];
      sol.ownership[active[k]] = reduced.ownership[k];
      sol.feasible[active[k]] = true;
    }
    sol.active_set = active;
    return sol;
  }

  const auto full = interior_solution(game);
  sol.feasible = feasibility(game);
  double owned = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sol.contributions[i] = sol.feasible[i] ? std::max(full.contributions[i], 0.0) : 0.0;
    sol.ownership[i] = sol.feasible[i] ? std::max(full.ownership[i], 0.0) : 0.0;
    owned += sol.ownership[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    sol.ownership[i] /= owned;
    if (sol.ownership[i] > 0.0) sol.active_set.push_back(i);
  }
  return sol;
}

std::vector<double> equilibrium_ownership(const GameInstance& game, FeasibilityMode mode) {
  return closed_form_equilibrium(game, mode).ownership;
}

std::vector<double> ownership_expression(const GameInstance& game) {
  const double n1 = static_cast<double>(game.size() - 1);
  const double total = game.total_unit_cost();
  std::vector<double> out(game.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::max(0.0, 1.0 - n1 * game.unit_cost(i) / total);
  }
  return out;
}

double asymptotic_ownership(double beta_i, double mean_beta, double effort_constant,
                            double governance) {
  if (!(beta_i > 0.0) || !(mean_beta > 0.0) || !(effort_constant > 0.0) || !(governance >= 0.0)) {
    throw ArgumentError("asymptotic ownership needs positive beta, mean and L, and t >= 0");
  }
  const double value =
      (effort_constant * mean_beta - effort_constant * beta_i) / (effort_constant * mean_beta + governance);
  return std::max(value, 0.0);
}

}  // namespace coedit
