#pragma once

#include "wpcn/hermitian.hpp"

#include <optional>
#include <span>
#include <vector>

namespace wpcn {

/// Per-device constants. All quantities in SI units.
struct DeviceProfile {
  double weight = 1.0;             ///< w_k >= 0
  double harvest_efficiency = 0.5; ///< eta_k in (0, 1]
  double circuit_power = 0.0;      ///< p_c,k [W]
  double initial_energy = 0.0;     ///< E^I_k [J]
  CVector dl_channel;              ///< h_k, length M (amplitude gain)
  double ul_gain_normalized = 0.0; ///< gamma_k = |g_k|^2 / sigma^2

  HermitianMatrix channel_outer() const { return HermitianMatrix::outer(dl_channel); }
  /// Devices with zero weight or zero UL gain contribute nothing to the
  /// objective; the solvers leave them unscheduled.
  bool contributes() const { return weight > 0.0 && ul_gain_normalized > 0.0; }
};

struct SystemInstance {
  int num_antennas = 1;
  std::vector<DeviceProfile> devices;
  double p_max = 10.0;          ///< [W]
  double period = 1.0;          ///< T [s]
  double noise_power = 1e-15;   ///< sigma^2 [W], informational only

  std::size_t num_devices() const { return devices.size(); }
  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

enum class Mode { kWptOn, kWptOff };
const char* to_string(Mode m);

struct Duals {
  std::optional<double> mu;  ///< absent in WPT_OFF mode
  double delta = 0.0;
  std::vector<double> lambda;
};

struct SolutionFlags {
  bool degenerate = false;      ///< no usable DL channel / nothing to optimise
  bool slack_time = false;      ///< off-mode: energy cannot fill the time budget
  bool converged = true;        ///< iterative benchmarks only
};

struct AllocationSolution {
  double tau0 = 0.0;
  std::vector<double> tau;
  std::vector<double> power;
  HermitianMatrix covariance;
  double wsr = 0.0;
  Mode mode = Mode::kWptOff;
  Duals duals;
  double kkt_residual = 0.0;
  SolutionFlags flags;

  bool scheduled(std::size_t k) const { return tau[k] > 0.0; }
};

/// eta * tr(V H); V is the energy-time product tau0 * W. Clamped at zero.
double harvested_energy(const HermitianMatrix& v, const HermitianMatrix& h, double eta);

/// tau * log2(1 + p * gamma), 0 when tau == 0.
double rate(double tau, double power, double gamma);

/// sum_k w_k * rate(tau_k, p_k, gamma_k)
double weighted_sum_rate(const AllocationSolution& sol, const SystemInstance& sys);

/// Energy available to each device under `sol`: harvested plus initial.
std::vector<double> available_energy(const AllocationSolution& sol, const SystemInstance& sys);

/// Throws SolverError when `sol` breaks the structural invariants of an
/// allocation (time budget, power budget, PSD covariance, mode consistency).
void check_invariants(const AllocationSolution& sol, const SystemInstance& sys);

}  // namespace wpcn
