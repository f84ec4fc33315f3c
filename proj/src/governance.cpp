#include "coedit/governance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coedit/error.hpp"

namespace coedit {

double entropy(std::span<const double> ownership, bool normalized) {
  if (ownership.empty()) throw ArgumentError("entropy of an empty distribution");
  double total = 0.0;
  double h = 0.0;
  for (double c : ownership) {
    if (!(c >= 0.0)) throw ArgumentError("ownership entries must be non-negative");
    total += c;
    if (c > 0.0) h -= c * std::log(c);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ArgumentError("ownership must sum to 1, got " + std::to_string(total));
  }
  if (!normalized) return h;
  if (ownership.size() < 2) return 0.0;
  return h / std::log(static_cast<double>(ownership.size()));
}

double entropy_at(std::span<const ContributorProfile> profiles, double effort_constant,
                  double governance, bool normalized) {
  const GameInstance game({profiles.begin(), profiles.end()}, effort_constant, governance);
  return entropy(equilibrium_ownership(game), normalized);
}

std::vector<double> ownership_gradient(std::span<const ContributorProfile> profiles,
                                       double effort_constant, double governance) {
  const GameInstance game({profiles.begin(), profiles.end()}, effort_constant, governance);
  const auto feasible = feasibility(game);
  if (std::find(feasible.begin(), feasible.end(), false) != feasible.end()) {
    throw PreconditionError("ownership gradient requires every contributor to be feasible");
  }
  const std::size_t n = game.size();
  const double nn = static_cast<double>(n);
  double effort = 0.0;
  for (const auto& p : profiles) effort += effort_constant * p.beta;
  const double mean_effort = effort / nn;
  const double denom = nn * governance + effort;
  std::vector<double> grad(n);
  for (std::size_t i = 0; i < n; ++i) {
    grad[i] = nn * (nn - 1.0) * (effort_constant * profiles[i].beta - mean_effort) / (denom * denom);
  }
  return grad;
}

double entropy_gradient(std::span<const ContributorProfile> profiles, double effort_constant,
                        double governance) {
  const auto grad = ownership_gradient(profiles, effort_constant, governance);
  const GameInstance game({profiles.begin(), profiles.end()}, effort_constant, governance);
  const auto c = equilibrium_ownership(game);
  double dh = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] > 0.0)) {
      throw PreconditionError("entropy gradient undefined: contributor '" +
                              profiles[i].contributor_id + "' has zero ownership");
    }
    dh -= grad[i] * (1.0 + std::log(c[i]));
  }
  return dh;
}

void GovernanceSearch::validate() const {
  if (!(z_star > 0.0) || !std::isfinite(z_star)) {
    throw ArgumentError("z_star must be positive and finite");
  }
  if (search_tolerance < 0.0) throw ArgumentError("search tolerance must be positive");
  if (grid_points < 2) throw ArgumentError("entropy grid needs at least two points");
}

double GovernanceSearch::effective_tolerance() const {
  return search_tolerance > 0.0 ? search_tolerance : 1e-6 * z_star;
}

namespace {

struct Best {
  double t = 0.0;
  double h = 0.0;
  bool any = false;

  // Near-equal values keep the smaller t.
  void offer(double cand_t, double cand_h) {
    if (!any) {
      t = cand_t;
      h = cand_h;
      any = true;
      return;
    }
    const double slack = 1e-14 * std::max(1.0, std::abs(h));
    if (cand_h > h + slack || (std::abs(cand_h - h) <= slack && cand_t < t)) {
      t = cand_t;
      h = cand_h;
    }
  }
};

}  // namespace

EntropyProfile optimal_governance(std::span<const ContributorProfile> profiles,
                                  double effort_constant, const GovernanceSearch& search) {
  search.validate();
  const double tol = search.effective_tolerance();
  const auto h_of = [&](double t) {
    return entropy_at(profiles, effort_constant, t, search.normalization);
  };

  EntropyProfile out;
  out.grid.reserve(search.grid_points);
  Best best;
  for (std::size_t k = 0; k < search.grid_points; ++k) {
    const double t = search.z_star * static_cast<double>(k) /
                     static_cast<double>(search.grid_points - 1);
    const double h = h_of(t);
    out.grid.emplace_back(t, h);
    best.offer(t, h);
  }
  out.grid_non_decreasing = std::adjacent_find(out.grid.begin(), out.grid.end(),
                                               [](const auto& a, const auto& b) {
                                                 return b.second < a.second;
                                               }) == out.grid.end();

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = search.z_star;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double hc = h_of(c);
  double hd = h_of(d);
  best.offer(c, hc);
  best.offer(d, hd);
  while (hi - lo > tol) {
    if (hc >= hd) {
      hi = d;
      d = c;
      hd = hc;
      c = hi - inv_phi * (hi - lo);
      hc = h_of(c);
      best.offer(c, hc);
    } else {
      lo = c;
      c = d;
      hc = hd;
      d = lo + inv_phi * (hi - lo);
      hd = h_of(d);
      best.offer(d, hd);
    }
  }

  out.argmax_t = best.t;
  out.max_entropy = best.h;
  out.constrained = search.z_star - best.t <= tol;
  return out;
}

}  // namespace coedit
