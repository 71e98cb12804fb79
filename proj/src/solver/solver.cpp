#include "wpcn/solver.hpp"

#include "wpcn/error.hpp"
#include "wpcn/kkt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace wpcn {

namespace {

const double kLn2 = std::log(2.0);
constexpr int kMaxBisect = 200;
constexpr int kMaxDoublings = 1100;  // enough to overflow any finite double
constexpr double kMuRelTol = 1e-12;
constexpr double kTieRelTol = 1e-12;

// Root of g_off(p) = target, or +inf when the bracket overflows a double
// (g_off only grows like log p).
double invert_or_infinity(const DeviceProfile& device, double target);

std::vector<double> powers_at(const SystemInstance& sys, double mu) {
  std::vector<double> p(sys.devices.size(), 0.0);
  for (std::size_t k = 0; k < p.size(); ++k)
    if (sys.devices[k].contributes()) p[k] = invert_or_infinity(sys.devices[k], mu * sys.p_max);
  return p;
}

// Root of an increasing function by Newton steps kept inside a bisection
// bracket. `eval(x)` returns {f(x), f'(x)}; requires f(lo) < 0 <= f(hi).
// Returns the upper end once the bracket spans adjacent doubles.
template <class Eval>
double increasing_root(Eval eval, double lo, double hi) {
  double x = hi;
  for (int it = 0; it < kMaxBisect; ++it) {
    const auto [f, df] = eval(x);
    if (f >= 0.0)
      hi = x;
    else
      lo = x;
    if (std::nextafter(lo, hi) >= hi) break;
    double next = x - f / df;
    if (!(df > 0.0) || !(next > lo && next < hi)) {
      next = lo + 0.5 * (hi - lo);
    } else if (std::abs(next - x) <= 2.0 * (std::nextafter(x, hi) - x)) {
      // Newton has stalled at rounding level; close the bracket one ulp at a time
      next = f >= 0.0 ? std::nextafter(x, lo) : std::nextafter(x, hi);
    }
    x = next;
  }
  return hi;
}

double drain_time(double energy, double p, double pc) {
  if (energy <= 0.0) return 0.0;
  const double draw = p + pc;
  return draw > 0.0 ? energy / draw : std::numeric_limits<double>::infinity();
}

}  // namespace

double g_off(double p, const DeviceProfile& device) {
  const double g = device.ul_gain_normalized;
  const double x = p * g;
  const double c = device.circuit_power * g;
  return device.weight * (std::log1p(x) - (x + c) / (1.0 + x)) / kLn2;
}

namespace {

// d g_off / dp = w g (x + c) / ((1 + x)^2 ln 2)
double g_off_slope(double p, const DeviceProfile& device) {
  const double g = device.ul_gain_normalized;
  const double x = p * g;
  const double c = device.circuit_power * g;
  return device.weight * g * (x + c) / ((1.0 + x) * (1.0 + x) * kLn2);
}

}  // namespace

double g_on(double p, const DeviceProfile& device, double mu, double p_max) {
  return g_off(p, device) - mu * p_max;
}

namespace {

double invert_or_infinity(const DeviceProfile& device, double target) {
  if (g_off(0.0, device) >= target) return 0.0;
  if (!device.contributes()) return std::numeric_limits<double>::infinity();

  double lo = 0.0;
  double hi = 1.0 / device.ul_gain_normalized;
  int doublings = 0;
  while (g_off(hi, device) < target) {
    if (++doublings > kMaxDoublings || !std::isfinite(hi)) return std::numeric_limits<double>::infinity();
    lo = hi;
    hi *= 2.0;
  }
  return increasing_root(
      [&](double p) { return std::pair{g_off(p, device) - target, g_off_slope(p, device)}; }, lo, hi);
}

}  // namespace

double invert_g_off(const DeviceProfile& device, double target) {
  const double p = invert_or_infinity(device, target);
  if (!std::isfinite(p)) throw SolverError("invert_g_off: root beyond the largest finite power");
  return p;
}

double energy_price(const DeviceProfile& device, double p) {
  if (!device.contributes() || !std::isfinite(p)) return 0.0;
  const double g = device.ul_gain_normalized;
  return device.weight * g / ((1.0 + p * g) * kLn2);
}

HermitianMatrix weighted_channel_sum(const SystemInstance& sys, std::span<const double> powers) {
  HermitianMatrix b = HermitianMatrix::zero(sys.num_antennas);
  for (std::size_t k = 0; k < sys.devices.size(); ++k) {
    const auto& d = sys.devices[k];
    if (!d.contributes()) continue;
    b += (energy_price(d, powers[k]) * d.harvest_efficiency) * d.channel_outer();
  }
  return b;
}

VirtualPowerResult solve_virtual_powers(const SystemInstance& sys) {
  sys.validate();

  std::optional<CVector> warm;
  auto phi = [&](double mu) {
    const auto p = powers_at(sys, mu);
    EigenPair e = max_eig(weighted_channel_sum(sys, p), warm);
    warm = e.vector;
    return e;
  };

  VirtualPowerResult out;
  const EigenPair at_zero = phi(0.0);
  if (!(at_zero.value > 0.0)) {
    out.degenerate = true;
    out.mu_star = 0.0;
    out.beam_v = at_zero.vector;
  } else {
    double lo = 0.0;
    double hi = at_zero.value;
    for (int it = 0; it < kMaxBisect && hi - lo > kMuRelTol * hi; ++it) {
      const double mid = lo + 0.5 * (hi - lo);
      if (phi(mid).value > mid)
        lo = mid;
      else
        hi = mid;
    }
    out.mu_star = lo + 0.5 * (hi - lo);
  }
  out.p_star = powers_at(sys, out.mu_star);
  if (!out.degenerate) out.beam_v = max_eig(weighted_channel_sum(sys, out.p_star), warm).vector;

  out.t_hat = 0.0;
  for (std::size_t k = 0; k < sys.devices.size(); ++k) {
    const auto& d = sys.devices[k];
    if (d.contributes()) out.t_hat += drain_time(d.initial_energy, out.p_star[k], d.circuit_power);
  }
  return out;
}

ActivationResult check_activation(const SystemInstance& sys) {
  ActivationResult r;
  r.vp = solve_virtual_powers(sys);
  r.t_hat = r.vp.t_hat;
  r.activate = sys.period - r.t_hat > kTieRelTol * sys.period;
  return r;
}

double activation_margin(const SystemInstance& sys) {
  return sys.period - solve_virtual_powers(sys).t_hat;
}

namespace {

struct OnModeTerms {
  std::vector<double> beam_energy;  // eta_k tr(W H_k)
  double drain_sum = 0.0;           // sum E_k / (p_k + p_c,k)
  double harvest_sum = 0.0;         // sum a_k / (p_k + p_c,k)
};

OnModeTerms on_mode_terms(const SystemInstance& sys, const VirtualPowerResult& vp, bool gamma_weighted) {
  OnModeTerms t;
  t.beam_energy.assign(sys.devices.size(), 0.0);
  for (std::size_t k = 0; k < sys.devices.size(); ++k) {
    const auto& d = sys.devices[k];
    const double gain = std::norm(vp.beam_v.dot(d.dl_channel));
    t.beam_energy[k] = d.harvest_efficiency * sys.p_max * gain;
    if (!d.contributes()) continue;
    const double draw = vp.p_star[k] + d.circuit_power;
    const double scale = gamma_weighted ? d.ul_gain_normalized : 1.0;
    t.drain_sum += scale * drain_time(d.initial_energy, vp.p_star[k], d.circuit_power);
    if (draw > 0.0) t.harvest_sum += scale * t.beam_energy[k] / draw;
  }
  return t;
}

}  // namespace

AllocationSolution solve_on_mode(const SystemInstance& sys, const VirtualPowerResult& vp) {
  const std::size_t k_count = sys.devices.size();
  if (vp.p_star.size() != k_count || vp.beam_v.size() != sys.num_antennas)
    throw std::invalid_argument("solve_on_mode: virtual power result does not match the instance");

  const OnModeTerms t = on_mode_terms(sys, vp, false);
  const double tau0 = (sys.period - t.drain_sum) / (1.0 + t.harvest_sum);
  if (!(tau0 > 0.0) || sys.period - t.drain_sum <= kTieRelTol * sys.period)
    throw SolverError("solve_on_mode: instance is outside the WPT activation region");

  AllocationSolution sol;
  sol.mode = Mode::kWptOn;
  sol.tau0 = tau0;
  sol.covariance = sys.p_max * HermitianMatrix::outer(vp.beam_v);
  sol.tau.assign(k_count, 0.0);
  sol.power.assign(k_count, 0.0);
  sol.duals.mu = vp.mu_star;
  sol.duals.delta = vp.mu_star * sys.p_max;
  sol.duals.lambda.assign(k_count, 0.0);
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto& d = sys.devices[k];
    if (!d.contributes()) continue;
    const double energy = t.beam_energy[k] * tau0 + d.initial_energy;
    const double draw = vp.p_star[k] + d.circuit_power;
    if (energy > 0.0 && draw > 0.0) {
      sol.tau[k] = energy / draw;
      sol.power[k] = vp.p_star[k];
    }
    sol.duals.lambda[k] = energy_price(d, vp.p_star[k]);
  }
  sol.flags.degenerate = vp.degenerate;
  sol.wsr = weighted_sum_rate(sol, sys);
  return sol;
}

double printed_tau0_variant(const SystemInstance& sys, const VirtualPowerResult& vp) {
  const OnModeTerms t = on_mode_terms(sys, vp, true);
  return (sys.period - t.drain_sum) / (1.0 + t.harvest_sum);
}

AllocationSolution solve_off_mode(double time_budget, std::span<const double> budgets,
                                  std::span<const DeviceProfile> devices) {
  if (!(time_budget > 0.0)) throw std::invalid_argument("solve_off_mode: time budget must be positive");
  if (budgets.size() != devices.size() || devices.empty())
    throw std::invalid_argument("solve_off_mode: budgets and devices differ in size");

  const std::size_t k_count = devices.size();
  std::vector<bool> sched(k_count, false);
  bool any = false;
  double max_weight = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    if (!(budgets[k] >= 0.0)) throw std::invalid_argument("solve_off_mode: negative energy budget");
    sched[k] = devices[k].contributes() && budgets[k] > 0.0;
    any = any || sched[k];
    max_weight = std::max(max_weight, devices[k].weight);
  }
  if (!any) throw SolverError("solve_off_mode: no device has energy to schedule");

  auto powers = [&](double delta) {
    std::vector<double> p(k_count, 0.0);
    for (std::size_t k = 0; k < k_count; ++k)
      if (sched[k]) p[k] = invert_or_infinity(devices[k], delta);
    return p;
  };
  auto time_used = [&](const std::vector<double>& p) {
    double s = 0.0;
    for (std::size_t k = 0; k < k_count; ++k)
      if (sched[k]) s += drain_time(budgets[k], p[k], devices[k].circuit_power);
    return s;
  };

  AllocationSolution sol;
  double delta = 0.0;
  std::vector<double> p = powers(0.0);
  const double fill_at_zero = time_used(p);
  if (fill_at_zero <= time_budget) {
    sol.flags.slack_time = fill_at_zero < time_budget * (1.0 - kTieRelTol);
  } else {
    double lo = 0.0;
    double hi = max_weight;
    int doublings = 0;
    while (time_used(powers(hi)) >= time_budget) {
      if (++doublings > kMaxDoublings) throw SolverError("solve_off_mode: delta beyond the bracket-doubling limit");
      lo = hi;
      hi *= 2.0;
    }
    // f(delta) = budget - time used; the time used falls as delta rises
    auto eval = [&](double d) {
      double used = 0.0;
      double slope = 0.0;
      for (std::size_t k = 0; k < k_count; ++k) {
        if (!sched[k]) continue;
        const double pk = invert_or_infinity(devices[k], d);
        const double draw = pk + devices[k].circuit_power;
        used += drain_time(budgets[k], pk, devices[k].circuit_power);
        if (pk > 0.0 && std::isfinite(pk)) slope += budgets[k] / (draw * draw) / g_off_slope(pk, devices[k]);
      }
      return std::pair{time_budget - used, slope};
    };
    hi = increasing_root(eval, lo, hi);
    // hi keeps the time sum within budget
    delta = hi;
    p = powers(delta);
    for (double pk : p)
      if (!std::isfinite(pk)) throw SolverError("solve_off_mode: power beyond the largest finite value");
  }

  const Eigen::Index m = devices.front().dl_channel.size();
  sol.mode = Mode::kWptOff;
  sol.tau0 = 0.0;
  sol.covariance = HermitianMatrix::zero(std::max<Eigen::Index>(m, 1));
  sol.tau.assign(k_count, 0.0);
  sol.power.assign(k_count, 0.0);
  sol.duals.delta = delta;
  sol.duals.lambda.assign(k_count, 0.0);
  for (std::size_t k = 0; k < k_count; ++k) {
    if (!devices[k].contributes()) continue;
    if (!sched[k]) {
      // idle devices are priced at the power they would use at this delta
      sol.duals.lambda[k] = energy_price(devices[k], invert_or_infinity(devices[k], delta));
      continue;
    }
    sol.tau[k] = drain_time(budgets[k], p[k], devices[k].circuit_power);
    sol.power[k] = p[k];
    sol.duals.lambda[k] = energy_price(devices[k], p[k]);
  }
  double wsr = 0.0;
  for (std::size_t k = 0; k < k_count; ++k)
    wsr += devices[k].weight * rate(sol.tau[k], sol.power[k], devices[k].ul_gain_normalized);
  sol.wsr = wsr;
  return sol;
}

AllocationSolution solve(const SystemInstance& sys) {
  const ActivationResult act = check_activation(sys);
  AllocationSolution sol;
  if (act.activate) {
    sol = solve_on_mode(sys, act.vp);
  } else {
    std::vector<double> budgets;
    budgets.reserve(sys.devices.size());
    for (const auto& d : sys.devices) budgets.push_back(d.initial_energy);
    sol = solve_off_mode(sys.period, budgets, sys.devices);
    if (sol.flags.slack_time)
      throw SolverError("solve: off-mode left the time budget slack although WPT was not activated");
    sol.covariance = HermitianMatrix::zero(sys.num_antennas);
  }
  sol.flags.degenerate = act.vp.degenerate;
  sol.wsr = weighted_sum_rate(sol, sys);
  sol.kkt_residual = kkt_check(sol, sys).max_residual;
  return sol;
}

}  // namespace wpcn
