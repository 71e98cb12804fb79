#include "wpcn/benchmarks.hpp"

#include "wpcn/error.hpp"
#include "wpcn/kkt.hpp"
#include "wpcn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace wpcn {

namespace {

constexpr int kScanPoints = 64;
constexpr double kGoldenRelTol = 1e-9;
constexpr double kUnimodalRelTol = 1e-9;
constexpr int kMaxFixedPoint = 500;
constexpr double kFixedPointTol = 1e-10;
constexpr int kMaxBacktracks = 40;

bool any_schedulable(const SystemInstance& sys, const std::vector<double>& budgets) {
  for (std::size_t k = 0; k < budgets.size(); ++k)
    if (sys.devices[k].contributes() && budgets[k] > 0.0) return true;
  return false;
}

std::vector<double> energy_budgets(const SystemInstance& sys, double tau0, const HermitianMatrix& w) {
  std::vector<double> b;
  b.reserve(sys.devices.size());
  const HermitianMatrix v = tau0 * w;
  for (const auto& d : sys.devices)
    b.push_back(harvested_energy(v, d.channel_outer(), d.harvest_efficiency) + d.initial_energy);
  return b;
}

AllocationSolution idle_solution(const SystemInstance& sys) {
  AllocationSolution sol;
  sol.mode = Mode::kWptOff;
  sol.covariance = HermitianMatrix::zero(sys.num_antennas);
  sol.tau.assign(sys.devices.size(), 0.0);
  sol.power.assign(sys.devices.size(), 0.0);
  sol.duals.lambda.assign(sys.devices.size(), 0.0);
  return sol;
}

// Best split of the UL time when WPT runs for tau0 with covariance w.
AllocationSolution allocation_at(const SystemInstance& sys, double tau0, const HermitianMatrix& w) {
  if (tau0 >= sys.period) return idle_solution(sys);
  const std::vector<double> budgets = energy_budgets(sys, tau0, w);
  AllocationSolution sol;
  if (any_schedulable(sys, budgets)) {
    sol = solve_off_mode(sys.period - tau0, budgets, sys.devices);
  } else {
    sol = idle_solution(sys);
  }
  if (tau0 > 0.0) {
    sol.tau0 = tau0;
    sol.covariance = w;
    sol.mode = Mode::kWptOn;
  } else {
    sol.covariance = HermitianMatrix::zero(sys.num_antennas);
  }
  sol.wsr = weighted_sum_rate(sol, sys);
  return sol;
}

void finish(AllocationSolution& sol, const SystemInstance& sys, const KktOptions& options) {
  check_invariants(sol, sys);
  sol.kkt_residual = kkt_check(sol, sys, options).max_residual;
}

}  // namespace

std::string to_string(Scheme scheme) {
  return scheme == Scheme::kIsotropic ? "ISOTROPIC" : "FIXED_TAU0";
}

BenchmarkResult isotropic_solve(const SystemInstance& sys) {
  sys.validate();
  const double period = sys.period;
  const HermitianMatrix w_iso = (sys.p_max / static_cast<double>(sys.num_antennas)) *
                                HermitianMatrix::identity(sys.num_antennas);
  auto f = [&](double tau0) { return allocation_at(sys, tau0, w_iso).wsr; };

  std::vector<double> grid(kScanPoints);
  std::vector<double> value(kScanPoints);
  for (int i = 0; i < kScanPoints; ++i) {
    grid[i] = period * i / (kScanPoints - 1);
    value[i] = f(grid[i]);
  }
  const auto peak = static_cast<int>(std::max_element(value.begin(), value.end()) - value.begin());
  const double slack = kUnimodalRelTol * std::max(value[peak], 1e-300);
  for (int i = 0; i + 1 < kScanPoints; ++i) {
    const bool rising = i < peak;
    if ((rising && value[i + 1] < value[i] - slack) || (!rising && value[i + 1] > value[i] + slack))
      throw SolverError("isotropic_solve: WSR is not unimodal in tau0 near tau0 = " +
                        std::to_string(grid[i + 1]));
  }

  double best_tau0 = grid[peak];
  double best = value[peak];
  double a = grid[std::max(peak - 1, 0)];
  double b = grid[std::min(peak + 1, kScanPoints - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > kGoldenRelTol * period) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  for (const auto& [x, fx] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
    if (fx > best) {
      best = fx;
      best_tau0 = x;
    }
  }

  BenchmarkResult res;
  res.scheme = Scheme::kIsotropic;
  res.solution = allocation_at(sys, best_tau0, w_iso);
  KktOptions options;
  options.beam_optimality = false;
  options.fixed_covariance = w_iso;
  finish(res.solution, sys, options);
  return res;
}

BenchmarkResult fixed_tau0_solve(const SystemInstance& sys, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("fixed_tau0_solve: fraction must lie in (0, 1)");
  sys.validate();
  const double tau0 = fraction * sys.period;
  const std::size_t k_count = sys.devices.size();

  auto beam = [&](const CVector& v) { return sys.p_max * HermitianMatrix::outer(v); };
  auto normalized = [](CVector v) {
    v.normalize();
    normalize_phase(v);
    return v;
  };

  const std::vector<double> no_power(k_count, 0.0);
  CVector v = normalized(max_eig(weighted_channel_sum(sys, no_power)).vector);
  AllocationSolution cur = allocation_at(sys, tau0, beam(v));

  BenchmarkResult res;
  res.scheme = Scheme::kFixedTau0;
  res.parameter = fraction;
  res.wsr_trace.push_back(cur.wsr);
  bool converged = false;
  for (int it = 0; it < kMaxFixedPoint && !converged; ++it) {
    HermitianMatrix b = HermitianMatrix::zero(sys.num_antennas);
    for (std::size_t k = 0; k < k_count; ++k) {
      const auto& d = sys.devices[k];
      if (cur.duals.lambda[k] > 0.0) b += (cur.duals.lambda[k] * d.harvest_efficiency) * d.channel_outer();
    }
    if (b.trace() <= 0.0) {
      converged = true;
      break;
    }
    CVector target = max_eig(b, v).vector;
    const Complex overlap = target.dot(v);  // target^H v
    if (std::abs(overlap) > 0.0) target *= overlap / std::abs(overlap);
    if ((target - v).norm() <= kFixedPointTol) {
      converged = true;
      break;
    }

    // Backtrack along the sphere until the WSR does not drop.
    bool accepted = false;
    double step = 1.0;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, step *= 0.5) {
      const CVector trial = normalized(v + step * (target - v));
      AllocationSolution cand = allocation_at(sys, tau0, beam(trial));
      if (cand.wsr >= cur.wsr) {
        const double moved = (trial - v).norm();
        const double gain = (cand.wsr - cur.wsr) / std::max(cur.wsr, 1e-300);
        v = trial;
        cur = std::move(cand);
        accepted = true;
        converged = moved <= kFixedPointTol && gain <= kFixedPointTol;
        break;
      }
    }
    res.wsr_trace.push_back(cur.wsr);
    // no ascent left along the eigenvector direction
    if (!accepted) converged = true;
  }

  res.solution = std::move(cur);
  res.solution.flags.converged = converged;
  KktOptions options;
  options.tau0_stationarity = false;
  finish(res.solution, sys, options);
  return res;
}

}  // namespace wpcn
