#pragma once

#include "wpcn/model.hpp"

#include <string>
#include <vector>

namespace wpcn {

enum class Scheme { kIsotropic, kFixedTau0 };

std::string to_string(Scheme scheme);

struct BenchmarkResult {
  Scheme scheme = Scheme::kIsotropic;
  AllocationSolution solution;
  double parameter = 0.0;        ///< tau0 / T fraction for kFixedTau0, 0 otherwise
  std::vector<double> wsr_trace;  ///< incumbent WSR after each fixed-point iteration
};

/// W = (P_max / M) I with tau0 chosen by golden-section search. A 64-point
/// scan of [0, T] brackets the maximum first and throws SolverError when the
/// scan is not unimodal.
BenchmarkResult isotropic_solve(const SystemInstance& sys);

/// tau0 = fraction * T with a rank-one beam found by the eigenvector
/// fixed point v <- principal eigenvector of sum_k lambda_k eta_k H_k.
/// Steps that would lower the WSR are backtracked along the unit sphere.
/// flags.converged is false when 500 iterations did not settle the beam.
BenchmarkResult fixed_tau0_solve(const SystemInstance& sys, double fraction);

}  // namespace wpcn
