#pragma once

#include "wpcn/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wpcn {

/// Residual of one optimality condition, normalised to be dimensionless.
struct Residual {
  std::string name;
  double value = 0.0;
};

struct KktReport {
  std::vector<Residual> stationarity;
  std::vector<Residual> complementarity;
  std::vector<Residual> feasibility;
  double max_residual = 0.0;

  double mu = 0.0;        ///< psi(B) reconstructed from the powers
  double delta = 0.0;     ///< reconstructed time price
  std::vector<double> lambda;

  /// Largest |value| among residuals whose name starts with `prefix`.
  double worst(const std::string& prefix) const;
};

struct KktOptions {
  /// Check optimality of tau0 (off for allocations with a fixed tau0).
  bool tau0_stationarity = true;
  /// Check that W is the optimal rank-one beam (off for a fixed W).
  bool beam_optimality = true;
  /// Covariance a fixed-beam scheme would use for WPT. When set, tau0 is
  /// priced against tr(B W_fixed) instead of P_max psi(B) in WPT-off mode.
  std::optional<HermitianMatrix> fixed_covariance;
  /// Relative slack tolerated before the candidate is rejected as infeasible.
  double feasibility_tol = 1e-6;
};

/// Reconstructs the dual variables of the convex reformulation from `sol`
/// and evaluates the first-order optimality system. Residuals:
///   stationarity    "delta[k]"   g_off(p_k) - delta, per scheduled device
///                   "tau0"       tr(B W) - delta            (WPT on)
///                   "tau0_dual"  max(0, P_max psi(B) - delta) (WPT off)
///                   "psi_mu"     psi(B) - delta / P_max      (WPT on, both
///                                checks enabled)
///                   "beam"       psi(B) tr(W) - tr(B W)     (WPT on)
///   complementarity "C1[k]", "C2", "C3"
///   feasibility     positive parts of the constraint violations.
/// Throws SolverError listing the violated constraints when `sol` is
/// infeasible beyond options.feasibility_tol.
KktReport kkt_check(const AllocationSolution& sol, const SystemInstance& sys, const KktOptions& options = {});

}  // namespace wpcn
