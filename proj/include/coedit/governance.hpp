#pragma once

// Leader side of the Stackelberg game: the community picks the governance
// level t to maximize the Shannon entropy of equilibrium ownership, subject
// to t <= z_star.

#include <span>
#include <utility>
#include <vector>

#include "coedit/model.hpp"

namespace coedit {

/// -sum c_i ln c_i with 0 ln 0 = 0; divided by ln N when `normalized`.
/// Throws ArgumentError unless entries are non-negative and sum to 1 +- 1e-9.
double entropy(std::span<const double> ownership, bool normalized);

/// Entropy of the iterative-exclusion equilibrium ownership at level t.
double entropy_at(std::span<const ContributorProfile> profiles, double effort_constant,
                  double governance, bool normalized = false);

/// d c_i* / dt = N(N-1)(L beta_i - L mean_beta) / (N t + sum_j L beta_j)^2.
/// Requires every contributor feasible at t.
std::vector<double> ownership_gradient(std::span<const ContributorProfile> profiles,
                                       double effort_constant, double governance);

/// dH/dt = -sum_i (d c_i*/dt)(1 + ln c_i*) for the unnormalized entropy.
/// Throws PreconditionError when some c_i* is zero.
double entropy_gradient(std::span<const ContributorProfile> profiles, double effort_constant,
                        double governance);

struct GovernanceSearch {
  double z_star = 1.0;            // upper bound on t
  double search_tolerance = 0.0;  // <= 0 selects 1e-6 * z_star
  bool normalization = true;
  std::size_t grid_points = 65;   // reported (t, H) samples, including both ends

  void validate() const;
  double effective_tolerance() const;
};

struct EntropyProfile {
  std::vector<std::pair<double, double>> grid;  // (t, H(t)), t strictly increasing
  double argmax_t = 0.0;
  double max_entropy = 0.0;
  bool constrained = false;  // argmax sits on the z_star boundary
  /// H was non-decreasing over the grid.
  bool grid_non_decreasing = false;
};

/// Golden-section maximization of H over [0, z_star]. Flat stretches resolve
/// to the smallest t.
EntropyProfile optimal_governance(std::span<const ContributorProfile> profiles,
                                  double effort_constant, const GovernanceSearch& search);

}  // namespace coedit
