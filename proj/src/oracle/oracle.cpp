#include "wpcn/oracle.hpp"

#include "wpcn/error.hpp"
#include "wpcn/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace wpcn::oracle {

namespace {

// The simplex tau0 + sum tau_k <= T is gridded in stick-breaking
// coordinates u in [0,1]^(K+1): tau_1 = u_1 T, tau_k = u_k * (time left after
// tau_1..tau_{k-1}), and tau0 = u_0 * (time left after all tau_k). Faces and
// corners of the simplex are then grid endpoints, and the time-exhausted face
// is u_0 = 1.
//
// Round 0 puts a third of each axis on a uniform grid and the rest on two
// geometric ladders (down to 1e-9) toward u = 0 and u = 1, because optima can
// sit arbitrarily close to a bound. Later rounds re-grid uniformly across
// ten local spacings around the incumbent.
std::vector<double> initial_axis(int points) {
  const int uniform = std::max(2, points / 3);
  const int ladder = (points - uniform) / 2;
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < uniform; ++i) v.push_back(static_cast<double>(i) / (uniform - 1));
  for (int j = 1; j <= ladder; ++j) {
    const double offset = std::pow(10.0, -9.0 * j / ladder);
    v.push_back(offset);
    v.push_back(1.0 - offset);
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool at_window_edge(const std::vector<double>& axis, double incumbent) {
  return (incumbent == axis.front() && axis.front() > 0.0) || (incumbent == axis.back() && axis.back() < 1.0);
}

// Shrinking re-grids ten local spacings around the incumbent. Without
// shrinking the window keeps its width and is re-centred, which lets the
// search walk along ridges that leave the current window.
std::vector<double> refined_axis(const std::vector<double>& axis, double incumbent, int points, bool shrink) {
  double lo = 0.0;
  double hi = 1.0;
  if (shrink) {
    const auto it = std::lower_bound(axis.begin(), axis.end(), incumbent);
    const std::size_t i = static_cast<std::size_t>(it - axis.begin());
    const double below = i > 0 ? incumbent - axis[i - 1] : 0.0;
    const double above = i + 1 < axis.size() ? axis[i + 1] - incumbent : 0.0;
    lo = std::max(0.0, incumbent - 5.0 * below);
    hi = std::min(1.0, incumbent + 5.0 * above);
  } else {
    const double half = 0.5 * (axis.back() - axis.front());
    lo = std::max(0.0, incumbent - half);
    hi = std::min(1.0, incumbent + half);
  }
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(points) + 1);
  for (int k = 0; k < points; ++k) v.push_back(lo + (hi - lo) * k / (points - 1));
  v.push_back(incumbent);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

constexpr int kMaxRecentres = 50;

}  // namespace

void GridSpec::validate(std::size_t num_devices) const {
  if (tau0_points < 2 || tau_points < 2) throw std::invalid_argument("GridSpec: at least two points per axis");
  if (refinement_rounds < 0) throw std::invalid_argument("GridSpec: negative refinement_rounds");
  double evals = tau0_points;
  for (std::size_t k = 0; k < num_devices; ++k) evals *= tau_points;
  evals *= refinement_rounds + 1;
  if (evals > 1e8) throw std::invalid_argument("GridSpec: more than 1e8 evaluations");
}

AllocationSolution grid_solve(const SystemInstance& sys, const GridSpec& spec) {
  sys.validate();
  const std::size_t k_count = sys.devices.size();
  if (k_count > 2 || sys.num_antennas != 1)
    throw SolverError("grid_solve: only K <= 2 devices and a single antenna are supported");
  spec.validate(k_count);

  const double period = sys.period;
  // With one antenna the covariance is the scalar P_max; harvesting is linear in tau0.
  const HermitianMatrix w_full = sys.p_max * HermitianMatrix::identity(1);
  std::array<double, 2> harvest_per_second{};
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto& d = sys.devices[k];
    harvest_per_second[k] = harvested_energy(w_full, d.channel_outer(), d.harvest_efficiency);
  }

  auto objective = [&](double tau0, const std::array<double, 2>& tau) {
    double total = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      if (tau[k] <= 0.0) continue;
      const auto& d = sys.devices[k];
      const double e = tau0 * harvest_per_second[k] + d.initial_energy - d.circuit_power * tau[k];
      if (e < 0.0) return -std::numeric_limits<double>::infinity();
      total += d.weight * rate(tau[k], e / tau[k], d.ul_gain_normalized);
    }
    return total;
  };

  std::array<std::vector<double>, 3> axes;
  axes[0] = initial_axis(spec.tau0_points);
  for (std::size_t k = 0; k < k_count; ++k) axes[k + 1] = initial_axis(spec.tau_points);
  if (k_count == 1) axes[2] = {0.0};

  double best = -std::numeric_limits<double>::infinity();
  std::array<double, 3> best_u{};
  double best_tau0 = 0.0;
  std::array<double, 2> best_tau{};
  int shrinks = 0;
  int recentres = 0;
  for (int round = 0; shrinks <= spec.refinement_rounds; ++round) {
    if (round > 0) {
      bool edge = false;
      for (std::size_t a = 0; a <= k_count; ++a) edge = edge || at_window_edge(axes[a], best_u[a]);
      const bool shrink = !edge || recentres >= kMaxRecentres;
      if (shrink) ++shrinks; else ++recentres;
      if (shrinks > spec.refinement_rounds) break;
      axes[0] = refined_axis(axes[0], best_u[0], spec.tau0_points, shrink);
      for (std::size_t k = 0; k < k_count; ++k) axes[k + 1] = refined_axis(axes[k + 1], best_u[k + 1], spec.tau_points, shrink);
    }
    for (double u1 : axes[1]) {
      const double t1 = u1 * period;
      const double left1 = std::max(0.0, period - t1);
      for (double u2 : axes[2]) {
        const std::array<double, 2> tau{t1, u2 * left1};
        const double left2 = std::max(0.0, left1 - tau[1]);
        for (double u0 : axes[0]) {
          const double tau0 = u0 * left2;
          const double v = objective(tau0, tau);
          // strict comparison keeps the first point visited on ties
          if (v > best) {
            best = v;
            best_u = {u0, u1, u2};
            best_tau0 = tau0;
            best_tau = tau;
          }
        }
      }
    }
  }

  AllocationSolution sol;
  sol.tau0 = best_tau0;
  sol.mode = best_tau0 > 0.0 ? Mode::kWptOn : Mode::kWptOff;
  sol.covariance = best_tau0 > 0.0 ? w_full : HermitianMatrix::zero(1);
  sol.tau.assign(k_count, 0.0);
  sol.power.assign(k_count, 0.0);
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto& d = sys.devices[k];
    sol.tau[k] = best_tau[k];
    if (best_tau[k] > 0.0) {
      const double e = best_tau0 * harvest_per_second[k] + d.initial_energy - d.circuit_power * best_tau[k];
      sol.power[k] = std::max(0.0, e) / best_tau[k];
    }
  }
  sol.wsr = weighted_sum_rate(sol, sys);
  return sol;
}

Verification verify(const SystemInstance& sys, const GridSpec& spec) {
  Verification v;
  v.grid = grid_solve(sys, spec);
  v.kkt = solve(sys);
  v.rel_gap = (v.kkt.wsr - v.grid.wsr) / std::max(v.grid.wsr, 1e-300);
  if (v.kkt.wsr == v.grid.wsr) v.rel_gap = 0.0;
  v.grid_report = kkt_check(v.grid, sys);
  return v;
}

}  // namespace wpcn::oracle
