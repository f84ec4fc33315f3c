#pragma once

// Contributor game: N contributors compete for fractional ownership of an
// article. Contributor i adds x_i units of content at a per-unit cost of
// L*beta_i + t, where beta_i is the contributor's average edit size, L the
// effort constant and t the governance (neutrality enforcement) level.
//
//   c_i = x_i / sum_j x_j
//   u_i = c_i - (L*beta_i + t) * x_i - f_i

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coedit {

struct ContributorProfile {
  std::string contributor_id;
  double beta = 1.0;  // average edit size, Levenshtein units per edit
};

enum class FeasibilityMode {
  /// Drop the largest-beta infeasible contributor and re-solve until every
  /// remaining contributor is feasible. Yields the constrained Nash point.
  iterative_exclusion,
  /// Evaluate the closed forms over all N and clamp negatives to zero;
  /// ownership is renormalized over the positive entries.
  clamp,
};

enum class SolverKind { closed_form, spectral, best_response };

std::string_view to_string(FeasibilityMode mode);
std::string_view to_string(SolverKind kind);
FeasibilityMode parse_feasibility_mode(std::string_view text);

/// One article's contributor game. Immutable after construction.
class GameInstance {
 public:
  static constexpr double kDefaultEffortConstant = 1.0;

  /// Throws ArgumentError on N < 2, non-positive beta or L, negative t,
  /// duplicate contributor ids, or a fixed-cost list of the wrong length.
  GameInstance(std::vector<ContributorProfile> profiles,
               double effort_constant = kDefaultEffortConstant,
               double governance = 0.0,
               std::optional<std::vector<double>> fixed_costs = std::nullopt);

  /// Anonymous contributors "c1".."cN" with the given betas.
  static GameInstance from_betas(std::span<const double> betas,
                                 double effort_constant = kDefaultEffortConstant,
                                 double governance = 0.0);

  std::size_t size() const noexcept { return profiles_.size(); }
  const std::vector<ContributorProfile>& profiles() const noexcept { return profiles_; }
  double effort_constant() const noexcept { return effort_constant_; }
  double governance() const noexcept { return governance_; }
  const std::vector<double>& fixed_costs() const noexcept { return fixed_costs_; }

  double beta(std::size_t i) const { return profiles_.at(i).beta; }
  /// L*beta_i + t.
  double unit_cost(std::size_t i) const;
  /// sum_j (L*beta_j + t).
  double total_unit_cost() const noexcept;
  double mean_beta() const noexcept;

  GameInstance with_governance(double t) const;
  /// The game restricted to `indices` (kept in the given order).
  GameInstance subgame(std::span<const std::size_t> indices) const;

 private:
  std::vector<ContributorProfile> profiles_;
  double effort_constant_;
  double governance_;
  std::vector<double> fixed_costs_;
};

using Allocation = std::vector<double>;

struct EquilibriumSolution {
  Allocation contributions;        // x*
  std::vector<double> ownership;   // c*
  std::vector<bool> feasible;      // participation condition per contributor
  std::vector<std::size_t> active_set;  // indices with x_i* > 0
  SolverKind solver = SolverKind::closed_form;
};

/// x_i / sum_j x_j - (L*beta_i + t) x_i - f_i.
double net_utility(const GameInstance& game, std::span<const double> alloc, std::size_t i);

std::vector<double> fractional_ownership(std::span<const double> alloc);

/// Entry i is true iff (N-1) L beta_i < sum_j L beta_j + t.
std::vector<bool> feasibility(const GameInstance& game);

/// Indices surviving iterative exclusion, ascending.
std::vector<std::size_t> active_contributors(const GameInstance& game);

/// Closed-form Nash equilibrium of the all-feasible game, with infeasible
/// contributors resolved according to `mode`.
EquilibriumSolution closed_form_equilibrium(
    const GameInstance& game, FeasibilityMode mode = FeasibilityMode::iterative_exclusion);

/// c_i* = [1 - (N-1)(L beta_i + t) / sum_j (L beta_j + t)]^+ under `mode`.
std::vector<double> equilibrium_ownership(
    const GameInstance& game, FeasibilityMode mode = FeasibilityMode::iterative_exclusion);

/// The per-contributor expression [1 - (N-1)(L beta_i + t) / sum_j (L beta_j + t)]^+
/// over the full game, without exclusion or renormalization. Entries need not
/// sum to 1 once someone is infeasible.
std::vector<double> ownership_expression(const GameInstance& game);

/// Large-N limit of ownership_expression:
/// ((L*mean_beta - L*beta_i) / (L*mean_beta + t))^+.
double asymptotic_ownership(double beta_i, double mean_beta, double effort_constant,
                            double governance);

}  // namespace coedit
