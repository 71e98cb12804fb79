#include "wpcn/kkt.hpp"

#include "wpcn/error.hpp"
#include "wpcn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wpcn {

double KktReport::worst(const std::string& prefix) const {
  double w = 0.0;
  for (const auto* group : {&stationarity, &complementarity, &feasibility})
    for (const auto& r : *group)
      if (r.name.rfind(prefix, 0) == 0) w = std::max(w, std::abs(r.value));
  return w;
}

KktReport kkt_check(const AllocationSolution& sol, const SystemInstance& sys, const KktOptions& options) {
  const std::size_t k_count = sys.devices.size();
  if (sol.tau.size() != k_count || sol.power.size() != k_count || sol.covariance.dim() != sys.num_antennas)
    throw std::invalid_argument("kkt_check: solution shape does not match the instance");

  KktReport rep;
  const double tol = options.feasibility_tol;
  const double period = sys.period;
  std::ostringstream violated;

  // Primal feasibility, C1..C4.
  double time_used = sol.tau0;
  for (double t : sol.tau) time_used += t;
  rep.feasibility.push_back({"C3", std::max(0.0, time_used - period) / period});
  rep.feasibility.push_back({"C4.tau0", std::max(0.0, -sol.tau0) / period});
  const double trace_w = sol.covariance.trace();
  rep.feasibility.push_back({"C2.trace", std::max(0.0, trace_w - sys.p_max) / sys.p_max});
  const double lowest = -max_eig(-1.0 * sol.covariance).value;
  rep.feasibility.push_back({"C2.psd", std::max(0.0, -lowest) / sys.p_max});
  const std::vector<double> avail = available_energy(sol, sys);
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto& d = sys.devices[k];
    const std::string id = "[" + std::to_string(k + 1) + "]";
    const double used = (sol.power[k] + d.circuit_power) * sol.tau[k];
    const double scale = std::max({avail[k], used, 1e-300});
    rep.feasibility.push_back({"C1" + id, std::max(0.0, used - avail[k]) / scale});
    rep.feasibility.push_back({"C4" + id, std::max({0.0, -sol.tau[k] / period, -sol.power[k]})});
  }
  for (const auto& r : rep.feasibility)
    if (r.value > tol) violated << ' ' << r.name << " (" << r.value << ")";
  if (!violated.str().empty()) throw SolverError("kkt_check: infeasible allocation:" + violated.str());

  // Dual reconstruction. delta comes from the scheduled devices; an idle
  // device is priced at the power it would use at that delta, which is the
  // smallest multiplier keeping its share of the Lagrangian bounded.
  double w_max = 0.0;
  for (const auto& d : sys.devices) w_max = std::max(w_max, d.weight);
  std::vector<double> device_delta;
  for (std::size_t k = 0; k < k_count; ++k)
    if (sys.devices[k].contributes() && sol.scheduled(k)) device_delta.push_back(g_off(sol.power[k], sys.devices[k]));

  const bool wpt_on = sol.tau0 > 0.0;
  std::vector<double> priced_power = sol.power;
  auto idle_power = [&](const DeviceProfile& d, double delta) {
    try {
      return invert_g_off(d, delta);
    } catch (const SolverError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  if (!device_delta.empty()) {
    double sum = 0.0;
    for (double v : device_delta) sum += v;
    rep.delta = sum / static_cast<double>(device_delta.size());
    for (std::size_t k = 0; k < k_count; ++k)
      if (sys.devices[k].contributes() && !sol.scheduled(k)) priced_power[k] = idle_power(sys.devices[k], rep.delta);
  }
  rep.lambda.assign(k_count, 0.0);
  for (std::size_t k = 0; k < k_count; ++k) rep.lambda[k] = energy_price(sys.devices[k], priced_power[k]);
  const HermitianMatrix b = weighted_channel_sum(sys, priced_power);
  rep.mu = max_eig(b).value;
  const double beam_value = b.trace_product(sol.covariance);  // tr(B W)
  if (device_delta.empty()) rep.delta = wpt_on ? beam_value : 0.0;
  const double delta_scale = std::max({std::abs(rep.delta), w_max, 1e-300});

  std::size_t idx = 0;
  for (std::size_t k = 0; k < k_count; ++k) {
    if (!(sys.devices[k].contributes() && sol.scheduled(k))) continue;
    rep.stationarity.push_back(
        {"delta[" + std::to_string(k + 1) + "]", (device_delta[idx++] - rep.delta) / delta_scale});
  }

  if (wpt_on) {
    if (options.tau0_stationarity) rep.stationarity.push_back({"tau0", (beam_value - rep.delta) / delta_scale});
    if (options.tau0_stationarity && options.beam_optimality) {
      const double mu_from_delta = rep.delta / sys.p_max;
      const double mu_scale = std::max({rep.mu, std::abs(mu_from_delta), 1e-300});
      rep.stationarity.push_back({"psi_mu", (rep.mu - mu_from_delta) / mu_scale});
    }
    if (options.beam_optimality) {
      const double ref = std::max(rep.mu * trace_w, 1e-300);
      rep.stationarity.push_back({"beam", (rep.mu * trace_w - beam_value) / ref});
      if (rep.mu > 0.0) rep.complementarity.push_back({"C2", (sys.p_max - trace_w) / sys.p_max});
    }
  } else if (options.tau0_stationarity) {
    if (options.fixed_covariance && options.fixed_covariance->dim() != sys.num_antennas)
      throw std::invalid_argument("kkt_check: fixed covariance does not match the instance");
    const double wpt_value =
        options.fixed_covariance ? b.trace_product(*options.fixed_covariance) : sys.p_max * rep.mu;
    rep.stationarity.push_back({"tau0_dual", std::max(0.0, wpt_value - rep.delta) / delta_scale});
  }

  for (std::size_t k = 0; k < k_count; ++k) {
    if (!(sys.devices[k].contributes() && sol.scheduled(k))) continue;
    const double used = (sol.power[k] + sys.devices[k].circuit_power) * sol.tau[k];
    rep.complementarity.push_back(
        {"C1[" + std::to_string(k + 1) + "]", (avail[k] - used) / std::max(avail[k], 1e-300)});
  }
  if (rep.delta > 0.0) rep.complementarity.push_back({"C3", (period - time_used) / period});

  for (const auto* group : {&rep.stationarity, &rep.complementarity, &rep.feasibility})
    for (const auto& r : *group) rep.max_residual = std::max(rep.max_residual, std::abs(r.value));
  return rep;
}

}  // namespace wpcn
