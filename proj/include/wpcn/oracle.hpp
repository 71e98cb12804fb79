#pragma once

#include "wpcn/kkt.hpp"
#include "wpcn/model.hpp"

namespace wpcn::oracle {

/// Brute-force search resolution. Each round evaluates about
/// tau0_points * tau_points^K candidates. `refinement_rounds` counts rounds
/// that re-grid each axis around the incumbent with a tenfold smaller local
/// step; rounds whose incumbent lands on a window edge re-centre instead.
struct GridSpec {
  int tau0_points = 101;
  int tau_points = 101;
  int refinement_rounds = 3;

  /// Throws std::invalid_argument if a count is < 2, rounds < 0, or the
  /// total number of evaluations for `num_devices` exceeds 1e8.
  void validate(std::size_t num_devices) const;
};

/// Exhaustive search over (tau0, tau_1[, tau_2]) on the simplex
/// tau0 + sum tau_k <= T, each device spending all the energy it has.
/// Only K <= 2 and M = 1 are supported (SolverError otherwise).
AllocationSolution grid_solve(const SystemInstance& sys, const GridSpec& spec);

struct Verification {
  double rel_gap = 0.0;  ///< (wsr_kkt - wsr_oracle) / max(wsr_oracle, tiny)
  AllocationSolution kkt;
  AllocationSolution grid;
  KktReport grid_report;  ///< optimality residuals of the grid incumbent
};

/// Runs the closed-form solver and the grid search on the same instance.
Verification verify(const SystemInstance& sys, const GridSpec& spec);

}  // namespace wpcn::oracle
