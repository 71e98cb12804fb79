#pragma once

#include "wpcn/model.hpp"

#include <span>
#include <vector>

namespace wpcn {

/// Marginal rate gain of device k per unit UL time at power p, net of the
/// energy price:  w log2(1+p g) - w (p + p_c) g / ((1 + p g) ln 2).
/// Strictly increasing in p for g > 0, identically zero for g == 0.
double g_off(double p, const DeviceProfile& device);

/// g_off(p) - mu * p_max. With mu = psi(B) this is the WPT-on stationarity
/// condition for the UL power.
double g_on(double p, const DeviceProfile& device, double mu, double p_max);

/// Smallest p >= 0 with g_off(p) >= target. Returns 0 when g_off(0) >= target.
/// Throws SolverError if the root is not a finite double.
double invert_g_off(const DeviceProfile& device, double target);

struct VirtualPowerResult {
  std::vector<double> p_star;  ///< 0 for devices that do not contribute
  double mu_star = 0.0;
  CVector beam_v;              ///< principal eigenvector of B(p_star)
  double t_hat = 0.0;          ///< time to drain all initial energy at p_star
  bool degenerate = false;     ///< B(p) == 0 for every p (no usable DL channel)
};

/// Weighted channel sum B = sum_k w_k eta_k g_k / ((1 + p_k g_k) ln 2) H_k
/// over contributing devices.
HermitianMatrix weighted_channel_sum(const SystemInstance& sys, std::span<const double> powers);

/// Dual variable of C1 at stationarity in e_k: w g / ((1 + p g) ln 2).
double energy_price(const DeviceProfile& device, double p);

/// Solves the coupled root system G_on,k(p_k) = 0 with mu = psi(B(p)).
///
/// Outer level: bisection on mu over [0, Phi(0)] for the fixed point
/// Phi(mu) = mu, where Phi(mu) = psi(B(p(mu))) is nonincreasing. Inner
/// level: per-device bisection of g_on(.; mu) = 0.
VirtualPowerResult solve_virtual_powers(const SystemInstance& sys);

struct ActivationResult {
  bool activate = false;
  double t_hat = 0.0;
  VirtualPowerResult vp;
};

/// WPT is worth activating iff T > T_hat; |T - T_hat| <= 1e-12 T counts as off.
ActivationResult check_activation(const SystemInstance& sys);

/// T - T_hat.
double activation_margin(const SystemInstance& sys);

/// Closed-form allocation when WPT is active: rank-one W = P_max v v^H,
/// tau0 from the time budget, every device drains its energy at p_star.
/// Throws SolverError if the instance is not in the activation region.
AllocationSolution solve_on_mode(const SystemInstance& sys, const VirtualPowerResult& vp);

/// tau0 as printed with gamma_k weighting the numerator and denominator
/// sums. Diagnostic only; solve_on_mode uses the energy-consistent form.
double printed_tau0_variant(const SystemInstance& sys, const VirtualPowerResult& vp);

/// Time/power split without WPT for arbitrary per-device energy budgets:
/// finds the common marginal value delta with sum_k b_k / (p_k(delta) + p_c,k)
/// equal to `time_budget`. Devices with zero budget or zero contribution stay
/// unscheduled. When even delta -> 0 cannot fill the time, the delta = 0
/// allocation is returned with flags.slack_time set.
/// tau0 is 0, W is an M x M zero matrix (M from the first device's channel).
AllocationSolution solve_off_mode(double time_budget, std::span<const double> budgets,
                                  std::span<const DeviceProfile> devices);

/// Optimal allocation for `sys`: activation test, then the matching branch.
/// Fills wsr, duals and kkt_residual.
AllocationSolution solve(const SystemInstance& sys);

}  // namespace wpcn
