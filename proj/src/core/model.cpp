#include "wpcn/model.hpp"

#include "wpcn/error.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wpcn {

const char* to_string(Mode m) { return m == Mode::kWptOn ? "WPT_ON" : "WPT_OFF"; }

void SystemInstance::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("SystemInstance: " + what); };
  if (num_antennas < 1) fail("num_antennas must be >= 1");
  if (devices.empty()) fail("at least one device is required");
  if (!(p_max > 0.0) || !std::isfinite(p_max)) fail("p_max must be positive");
  if (!(period > 0.0) || !std::isfinite(period)) fail("period must be positive");
  if (!(noise_power > 0.0)) fail("noise_power must be positive");
  for (std::size_t k = 0; k < devices.size(); ++k) {
    const auto& d = devices[k];
    const std::string tag = "device " + std::to_string(k + 1) + ": ";
    if (d.dl_channel.size() != num_antennas) fail(tag + "dl_channel length differs from num_antennas");
    if (!(d.harvest_efficiency > 0.0 && d.harvest_efficiency <= 1.0)) fail(tag + "harvest_efficiency outside (0,1]");
    if (!(d.weight >= 0.0)) fail(tag + "weight must be >= 0");
    if (!(d.circuit_power >= 0.0)) fail(tag + "circuit_power must be >= 0");
    if (!(d.initial_energy >= 0.0)) fail(tag + "initial_energy must be >= 0");
    if (!(d.ul_gain_normalized >= 0.0) || !std::isfinite(d.ul_gain_normalized))
      fail(tag + "ul_gain_normalized must be finite and >= 0");
    if (!d.dl_channel.allFinite()) fail(tag + "dl_channel has non-finite entries");
  }
}

double harvested_energy(const HermitianMatrix& v, const HermitianMatrix& h, double eta) {
  if (v.dim() != h.dim()) throw std::invalid_argument("harvested_energy: dimension mismatch");
  return std::max(0.0, eta * v.trace_product(h));
}

double rate(double tau, double power, double gamma) {
  if (tau <= 0.0) return 0.0;
  return tau * std::log1p(power * gamma) / std::log(2.0);
}

double weighted_sum_rate(const AllocationSolution& sol, const SystemInstance& sys) {
  double total = 0.0;
  for (std::size_t k = 0; k < sys.devices.size(); ++k) {
    const auto& d = sys.devices[k];
    total += d.weight * rate(sol.tau[k], sol.power[k], d.ul_gain_normalized);
  }
  return total;
}

std::vector<double> available_energy(const AllocationSolution& sol, const SystemInstance& sys) {
  std::vector<double> out(sys.devices.size());
  const HermitianMatrix v = sol.tau0 * sol.covariance;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& d = sys.devices[k];
    out[k] = harvested_energy(v, d.channel_outer(), d.harvest_efficiency) + d.initial_energy;
  }
  return out;
}

void check_invariants(const AllocationSolution& sol, const SystemInstance& sys) {
  std::ostringstream bad;
  const std::size_t k_count = sys.devices.size();
  if (sol.tau.size() != k_count || sol.power.size() != k_count)
    throw SolverError("allocation size does not match the number of devices");
  if (sol.covariance.dim() != sys.num_antennas)
    throw SolverError("covariance dimension does not match num_antennas");

  double used = sol.tau0;
  for (double t : sol.tau) used += t;
  if (used > sys.period + 1e-9) bad << " time budget exceeded (" << used << " > " << sys.period << ");";
  if (sol.tau0 < 0.0) bad << " negative tau0;";
  for (std::size_t k = 0; k < k_count; ++k)
    if (sol.tau[k] < 0.0 || sol.power[k] < 0.0) bad << " negative tau/power for device " << k + 1 << ";";
  if (sol.covariance.trace() > sys.p_max * (1.0 + 1e-9)) bad << " trace(W) exceeds p_max;";
  const double lowest = -max_eig(-1.0 * sol.covariance).value;
  if (lowest < -1e-9 * sys.p_max) bad << " W is not positive semidefinite;";
  if (sol.mode == Mode::kWptOff &&
      (sol.tau0 != 0.0 || sol.covariance.matrix().cwiseAbs().maxCoeff() != 0.0))
    bad << " WPT_OFF with non-zero tau0 or W;";
  if (!bad.str().empty()) throw SolverError("allocation invariants violated:" + bad.str());
}

}  // namespace wpcn
