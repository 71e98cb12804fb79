// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).

#include "test_support.hpp"
#include "wpcn/benchmarks.hpp"
#include "wpcn/config.hpp"
#include "wpcn/kkt.hpp"
#include "wpcn/oracle.hpp"
#include "wpcn/simkit.hpp"
#include "wpcn/solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace wpcn;

namespace {

// Pinned tolerances and budgets.
constexpr double kThresholdTarget = 2.4e-6;      // J
constexpr double kThresholdRelTol = 0.10;
constexpr double kThresholdSweepSeconds = 5.0;
constexpr int kThresholdSweepPoints = 200;
constexpr double kMonotoneTol = 1e-12;           // relative, for tau0 and margins
constexpr double kOracleGapTol = 1e-3;
constexpr double kOracleSeconds = 120.0;
constexpr double kKktTol = 1e-6;
constexpr double kMedianSolveSeconds = 0.010;
constexpr double kPlateauTol = 1e-8;
constexpr double kPowerMonotoneTol = 1e-10;      // relative
constexpr double kTraceTol = 1e-9;
constexpr double kRankTol = 1e-9;
constexpr double kAlignmentMin = 0.999;
constexpr double kDominanceTol = 1e-9;
constexpr double kSlopeRelTol = 0.02;
constexpr double kBenchmarkSeconds = 300.0;

const std::string kConfigDir = std::string(WPCN_SOURCE_DIR) + "/configs/";

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return v;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

sim::GeometrySpec geometry_of(const RunConfig& c) {
  sim::GeometrySpec g;
  g.dl_distance = c.dl_distance;
  g.ul_distance = c.ul_distance;
  g.dl_exponent = c.dl_exponent;
  g.ul_exponent = c.ul_exponent;
  return g;
}

void scale_energy(SystemInstance& sys, double factor) {
  for (auto& d : sys.devices) d.initial_energy *= factor;
}

// Scales every initial energy so that T_hat = ratio * T. Instances with no
// initial energy first get 1 uJ per device.
void set_drain_ratio(SystemInstance& sys, double ratio) {
  double t_hat = check_activation(sys).t_hat;
  if (!(t_hat > 0.0)) {
    for (auto& d : sys.devices) d.initial_energy = 1e-6;
    t_hat = check_activation(sys).t_hat;
  }
  scale_energy(sys, ratio * sys.period / t_hat);
}

Verdict activation_threshold() {
  const RunConfig c = parse_config(kConfigDir + "activation_threshold.json");
  const double period = 0.05;
  SystemInstance base = build_instance(c);
  const std::vector<double> energies = logspace(1e-8, 1e-5, kThresholdSweepPoints);

  const auto t0 = Clock::now();
  const sim::SweepResult r = sim::sweep_initial_energy(geometry_of(c), base, energies, {period}, c.seed);
  const double elapsed = seconds_since(t0);
  const std::vector<double>& tau0 = r.find("tau0_T0.05").values;

  bool monotone = true;
  for (std::size_t i = 1; i < tau0.size(); ++i) monotone = monotone && tau0[i] <= tau0[i - 1] + kMonotoneTol * period;
  const auto first_zero = std::find(tau0.begin(), tau0.end(), 0.0);
  if (first_zero == tau0.begin() || first_zero == tau0.end())
    return {false, "tau0 does not cross zero inside the sweep"};
  const std::size_t iz = static_cast<std::size_t>(first_zero - tau0.begin());
  bool stays_zero = std::all_of(first_zero, tau0.end(), [](double t) { return t == 0.0; });

  // exact crossing: T_hat is linear in a common E_I because p_star does not depend on it
  SystemInstance sys = sim::sample_instance(geometry_of(c), base, c.seed, true);
  sys.period = period;
  for (auto& d : sys.devices) d.initial_energy = 1.0;
  const double threshold = period / check_activation(sys).t_hat;
  const bool bracketed = energies[iz - 1] < threshold && threshold <= energies[iz];
  const bool close = std::abs(threshold / kThresholdTarget - 1.0) <= kThresholdRelTol;
  const bool fast = elapsed < kThresholdSweepSeconds;
  return {monotone && stays_zero && bracketed && close && fast,
          fmt("threshold %.4g J (target %.2g J +-%.0f%%), first zero-tau0 grid point %.4g J, tau0 nonincreasing=%s, "
              "%d-point sweep %.2f s (limit %.0f s)",
              threshold, kThresholdTarget, 100 * kThresholdRelTol, energies[iz], monotone && stays_zero ? "yes" : "no",
              kThresholdSweepPoints, elapsed, kThresholdSweepSeconds)};
}

Verdict activation_equivalence() {
  std::mt19937_64 rng(2);
  int disagree = 0, on = 0, off = 0, dual_bad = 0, gain_bad = 0;
  for (int t = 0; t < 500; ++t) {
    const SystemInstance sys = testing::random_instance(rng, 1 + t % 5, 1 + (t / 5) % 4);
    const ActivationResult act = check_activation(sys);
    const AllocationSolution sol = solve(sys);
    if ((sol.tau0 > 0.0) != act.activate) ++disagree;
    if (act.activate) {
      ++on;
      // WPT must not lose against the best allocation without it
      std::vector<double> budgets;
      bool any = false;
      for (const auto& d : sys.devices) {
        budgets.push_back(d.initial_energy);
        any = any || (d.contributes() && d.initial_energy > 0.0);
      }
      if (any && solve_off_mode(sys.period, budgets, sys.devices).wsr > sol.wsr * (1.0 + 1e-12)) ++gain_bad;
    } else {
      ++off;
      // starting WPT cannot help: the tau0 dual condition holds
      if (kkt_check(sol, sys).worst("tau0_dual") > kKktTol) ++dual_bad;
    }
  }
  return {disagree == 0 && dual_bad == 0 && gain_bad == 0 && on > 0 && off > 0,
          fmt("500 instances (%d WPT on, %d off): %d disagreements between tau0 > 0 and the activation test, "
              "%d off-mode instances where WPT would pay, %d on-mode instances beaten without WPT",
              on, off, disagree, dual_bad, gain_bad)};
}

Verdict oracle_equivalence() {
  std::mt19937_64 rng(3);
  const auto t0 = Clock::now();
  double worst = 0.0, most_negative = 0.0;
  for (int t = 0; t < 100; ++t) {
    const SystemInstance sys = testing::random_instance(rng, 1 + t % 2, 1);
    oracle::GridSpec grid;
    grid.refinement_rounds = 3;
    const oracle::Verification v = oracle::verify(sys, grid);
    worst = std::max(worst, std::abs(v.rel_gap));
    most_negative = std::min(most_negative, v.rel_gap);
  }
  const double elapsed = seconds_since(t0);
  return {worst <= kOracleGapTol && -most_negative <= kOracleGapTol && elapsed < kOracleSeconds,
          fmt("100 instances K in {1,2}, M=1: max |gap| %.3g (limit %.0e), oracle above solver by at most %.3g, "
              "%.1f s (limit %.0f s)",
              worst, kOracleGapTol, std::max(0.0, -most_negative), elapsed, kOracleSeconds)};
}

Verdict kkt_suite() {
  std::mt19937_64 rng(4);
  std::vector<double> times;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const SystemInstance sys = testing::random_instance(rng, 1 + t % 8, 1 + (t / 8) % 8);
    const auto t0 = Clock::now();
    const AllocationSolution sol = solve(sys);
    times.push_back(seconds_since(t0));
    worst = std::max(worst, kkt_check(sol, sys).max_residual);
  }
  std::nth_element(times.begin(), times.begin() + 500, times.end());
  const double median = times[500];
  return {worst <= kKktTol && median < kMedianSolveSeconds,
          fmt("1000 instances K<=8, M<=8: max KKT residual %.3g (limit %.0e), median solve %.3f ms (limit %.0f ms)",
              worst, kKktTol, 1e3 * median, 1e3 * kMedianSolveSeconds)};
}

Verdict power_plateau() {
  std::mt19937_64 rng(5);
  double plateau = 0.0;
  int plateau_cases = 0, mode_slips = 0, t_viol = 0, e_viol = 0;
  for (int t = 0; t < 50; ++t) {
    SystemInstance sys = testing::random_instance(rng, 1 + t % 5, 1 + (t / 5) % 4);
    set_drain_ratio(sys, 0.25);
    const AllocationSolution ref = solve(sys);
    for (double tf : linspace(1.0, 4.0, 8)) {
      for (double ef : linspace(0.0, 2.0, 8)) {
        SystemInstance v = sys;
        v.period *= tf;
        scale_energy(v, ef);
        const AllocationSolution s = solve(v);
        if (s.mode != Mode::kWptOn) {
          ++mode_slips;
          continue;
        }
        ++plateau_cases;
        for (std::size_t k = 0; k < s.power.size(); ++k)
          if (ref.power[k] > 0.0) plateau = std::max(plateau, std::abs(s.power[k] / ref.power[k] - 1.0));
      }
    }

    SystemInstance offsys = sys;
    set_drain_ratio(offsys, 2.0);
    std::vector<double> prev;
    for (double tf : linspace(0.25, 1.0, 20)) {
      SystemInstance v = offsys;
      v.period *= tf;
      const AllocationSolution s = solve(v);
      for (std::size_t k = 0; k < prev.size(); ++k)
        if (s.power[k] > prev[k] * (1.0 + kPowerMonotoneTol)) ++t_viol;
      prev = s.power;
    }
    prev.clear();
    for (double ef : linspace(1.0, 3.0, 20)) {
      SystemInstance v = offsys;
      scale_energy(v, ef);
      const AllocationSolution s = solve(v);
      for (std::size_t k = 0; k < prev.size(); ++k)
        if (s.power[k] < prev[k] * (1.0 - kPowerMonotoneTol)) ++e_viol;
      prev = s.power;
    }
  }
  return {plateau <= kPlateauTol && mode_slips == 0 && t_viol == 0 && e_viol == 0,
          fmt("on-mode: max relative power change %.3g over %d (T x[1,4], E_I x[0,2]) variants (limit %.0e), "
              "%d left on-mode; off-mode 20-point grids: %d increases in T, %d decreases in E_I",
              plateau, plateau_cases, kPlateauTol, mode_slips, t_viol, e_viol)};
}

Verdict margin_ladders() {
  std::mt19937_64 rng(6);
  int violations = 0, steps = 0;
  int by_param[3] = {0, 0, 0};
  double worst = 0.0;
  auto ladder = [&](int param, const SystemInstance& base, const std::function<void(SystemInstance&, double)>& set,
                    const std::vector<double>& values) {
    double prev = -INFINITY;
    for (double x : values) {
      SystemInstance v = base;
      set(v, x);
      const double m = activation_margin(v);
      if (std::isfinite(prev)) {
        ++steps;
        const double drop = prev - m;
        const double scale = std::max(v.period, std::abs(m));
        worst = std::max(worst, drop / scale);
        if (drop > kMonotoneTol * scale) {
          ++violations;
          ++by_param[param];
        }
      }
      prev = m;
    }
  };
  for (int t = 0; t < 50; ++t) {
    SystemInstance sys = testing::random_instance(rng, 1 + t % 5, 1 + (t / 5) % 4);
    set_drain_ratio(sys, 0.5 + (t % 3) * 0.5);
    const double p0 = sys.p_max;
    ladder(0, sys, [&](SystemInstance& v, double x) { v.p_max = p0 * x; }, logspace(0.1, 10.0, 20));
    for (std::size_t k = 0; k < sys.devices.size(); ++k) {
      const double pc0 = sys.devices[k].circuit_power;
      ladder(1, sys, [&](SystemInstance& v, double x) { v.devices[k].harvest_efficiency = x; }, linspace(0.05, 1.0, 20));
      ladder(2, sys, [&](SystemInstance& v, double x) { v.devices[k].circuit_power = pc0 * x; }, logspace(0.1, 10.0, 20));
    }
  }
  return {violations == 0, fmt("50 instances, %d ladder steps: decreases of T - T_hat beyond %.0e: %d in P_max, "
                               "%d in eta_k, %d in p_c,k (largest relative drop %.3g)",
                               steps, kMonotoneTol, by_param[0], by_param[1], by_param[2], worst)};
}

Verdict beam_structure() {
  std::mt19937_64 rng(7);
  int on = 0;
  double trace_err = 0.0, second = 0.0;
  for (int t = 0; t < 400; ++t) {
    const SystemInstance sys = testing::random_instance(rng, 1 + t % 8, 1 + (t / 8) % 8);
    const AllocationSolution sol = solve(sys);
    if (sol.mode != Mode::kWptOn) continue;
    ++on;
    trace_err = std::max(trace_err, std::abs(sol.covariance.trace() / sys.p_max - 1.0));
    if (sys.num_antennas > 1) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(sol.covariance.matrix(), Eigen::EigenvaluesOnly);
      second = std::max(second, es.eigenvalues()(sys.num_antennas - 2) / sys.p_max);
    }
  }
  double alignment = 1.0;
  for (int t = 0; t < 30; ++t) {
    SystemInstance sys = testing::random_instance(rng, 2, 4);
    sys.devices[0].weight = 1e6;
    sys.devices[1].weight = 1.0;
    for (auto& d : sys.devices) d.initial_energy = 0.0;
    const AllocationSolution sol = solve(sys);
    const CVector v = max_eig(sol.covariance).vector;
    const CVector& h = sys.devices[0].dl_channel;
    alignment = std::min(alignment, std::abs(v.dot(h)) / h.norm());
  }
  return {on > 0 && trace_err <= kTraceTol && second <= kRankTol && alignment >= kAlignmentMin,
          fmt("%d on-mode solutions: max |tr W / P_max - 1| %.3g (limit %.0e), max second eigenvalue / P_max %.3g "
              "(limit %.0e); weight ratio 1e6: min |v^H h_1| / |h_1| %.6f (min %.3f)",
              on, trace_err, kTraceTol, second, kRankTol, alignment, kAlignmentMin)};
}

Verdict benchmark_trends() {
  const auto t0 = Clock::now();
  const RunConfig kc = parse_config(kConfigDir + "wsr_vs_devices.json");
  const RunConfig mc = parse_config(kConfigDir + "wsr_vs_antennas.json");
  const sim::ComparisonSweep ks = sim::sweep_devices(build_ensemble(kc), kc.sweep_devices, kc.trials, kc.seed, 1);
  const sim::ComparisonSweep ms = sim::sweep_antennas(build_ensemble(mc), mc.sweep_antennas, mc.trials, mc.seed, 1);
  const double elapsed = seconds_since(t0);

  int order_viol = 0, trials = 0;
  for (const auto* sweep : {&ks, &ms})
    for (const auto& row : sweep->samples)
      for (const auto& s : row) {
        ++trials;
        if (s.isotropic > s.optimal * (1.0 + kDominanceTol) || s.fixed_tau0 > s.optimal * (1.0 + kDominanceTol))
          ++order_viol;
      }

  const auto& ko = ks.summary.find("optimal_mean").values;
  const auto& ki = ks.summary.find("isotropic_mean").values;
  const double gap_first = ko.front() - ki.front();
  const double gap_last = ko.back() - ki.back();

  const auto& mo = ms.summary.find("optimal_mean").values;
  const auto& mi = ms.summary.find("isotropic_mean").values;
  const auto& mx = ms.summary.axis_values;
  const double n = static_cast<double>(mx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    sx += mx[i];
    sy += mi[i];
    sxx += mx[i] * mx[i];
    sxy += mx[i] * mi[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  bool opt_monotone = true;
  for (std::size_t i = 1; i < mo.size(); ++i) opt_monotone = opt_monotone && mo[i] >= mo[i - 1];

  const bool pass = order_viol == 0 && gap_last < gap_first && std::abs(slope) <= kSlopeRelTol * mi.front() &&
                    opt_monotone && elapsed < kBenchmarkSeconds;
  return {pass, fmt("%d trials: %d where a benchmark beats the optimum; optimal-isotropic gap %.4g at K=%g -> %.4g at "
                    "K=%g; isotropic slope over M %.4g per antenna (limit %.4g); optimal nondecreasing in M=%s; "
                    "%.1f s on one thread (limit %.0f s)",
                    trials, order_viol, gap_first, ks.summary.axis_values.front(), gap_last,
                    ks.summary.axis_values.back(), slope, kSlopeRelTol * mi.front(), opt_monotone ? "yes" : "no",
                    elapsed, kBenchmarkSeconds)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict reproducibility() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("wpcn_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  RunConfig kc = parse_config(kConfigDir + "wsr_vs_devices.json");
  kc.sweep_devices = {2, 5};
  kc.trials = 8;
  RunConfig mc = parse_config(kConfigDir + "wsr_vs_antennas.json");
  mc.sweep_antennas = {1, 3};
  mc.trials = 6;
  RunConfig ec = parse_config(kConfigDir + "activation_threshold.json");
  ec.sweep_energies = logspace(1e-8, 1e-5, 40);

  struct Case {
    const char* command;
    RunConfig config;
  };
  const Case cases[] = {{"sweep-devices", kc}, {"sweep-antennas", mc}, {"sweep-energy", ec}};
  int compared = 0, mismatches = 0, failures = 0;
  for (const auto& c : cases) {
    const fs::path cfg = dir / (std::string(c.command) + ".json");
    std::ofstream(cfg) << to_json(c.config);
    std::string first;
    for (const char* jobs : {"1", "1", "3"}) {
      const fs::path out = dir / (std::string(c.command) + "_" + std::to_string(compared) + ".csv");
      const std::string cmd = std::string(WPCN_CLI_PATH) + " " + c.command + " --config " + cfg.string() +
                              " --jobs " + jobs + " --out " + out.string() + " > /dev/null";
      if (std::system(cmd.c_str()) != 0) {
        ++failures;
        continue;
      }
      const std::string body = slurp(out);
      ++compared;
      if (first.empty())
        first = body;
      else if (body != first)
        ++mismatches;
    }
  }
  fs::remove_all(dir);
  return {failures == 0 && mismatches == 0,
          fmt("%d CSV files from 3 sweeps (jobs 1, 1, 3): %d byte mismatches, %d failed runs", compared, mismatches,
              failures)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"activation threshold", activation_threshold},
      {"activation test agrees with tau0 > 0", activation_equivalence},
      {"grid-search oracle equivalence", oracle_equivalence},
      {"KKT residual suite", kkt_suite},
      {"transmit-power plateau and off-mode monotonicity", power_plateau},
      {"activation margin monotonicity", margin_ladders},
      {"rank-one energy beam", beam_structure},
      {"benchmark ordering and trends", benchmark_trends},
      {"byte-identical sweep output", reproducibility},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("[%s] %d. %s: %s\n", v.pass ? "PASS" : "FAIL", index, name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed;
}
