#include "wpcn/cli.hpp"

#include "wpcn/error.hpp"
#include "wpcn/oracle.hpp"
#include "wpcn/simkit.hpp"
#include "wpcn/solver.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <stdexcept>

namespace wpcn {

namespace {

constexpr double kVerifyGapTol = 1e-3;
constexpr std::uint64_t kVerifyEnergyStream = 0x7665726966ULL;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

const char* flag(bool b) { return b ? "true" : "false"; }

void write_sweep(sim::SweepResult result, const RunConfig& config, std::ostream& out) {
  result.config_hash = config_hash(config);
  if (config.out.empty()) {
    out << sim::to_csv(result);
  } else {
    sim::emit(result, config.out);
    out << "wrote " << config.out << "\n";
  }
}

int cmd_solve(const RunConfig& config, std::ostream& out) {
  const SystemInstance sys = build_instance(config);
  const AllocationSolution sol = solve(sys);
  check_invariants(sol, sys);
  out << "mode=" << to_string(sol.mode) << "\n";
  out << "tau0=" << num(sol.tau0) << "\n";
  for (std::size_t k = 0; k < sol.tau.size(); ++k)
    out << "device=" << k + 1 << " tau=" << num(sol.tau[k]) << " power=" << num(sol.power[k]) << "\n";
  out << "wsr=" << num(sol.wsr) << "\n";
  out << "kkt_residual=" << num(sol.kkt_residual) << "\n";
  out << "degenerate=" << flag(sol.flags.degenerate) << "\n";
  return kExitOk;
}

int cmd_activation(const RunConfig& config, std::ostream& out) {
  const SystemInstance sys = build_instance(config);
  const ActivationResult act = check_activation(sys);
  out << "activate=" << flag(act.activate) << ", T_hat=" << num(act.t_hat) << ", margin=" << num(sys.period - act.t_hat)
      << "\n";
  out << "mu_star=" << num(act.vp.mu_star) << "\n";
  for (std::size_t k = 0; k < act.vp.p_star.size(); ++k)
    out << "device=" << k + 1 << " p_star=" << num(act.vp.p_star[k]) << "\n";
  out << "degenerate=" << flag(act.vp.degenerate) << "\n";
  return kExitOk;
}

int cmd_sweep_energy(const RunConfig& config, std::ostream& out) {
  if (config.dl_channels) throw ConfigError("devices.dl_channels: sweep-energy draws its own channels");
  const SystemInstance base = build_instance(config);
  sim::GeometrySpec geom;
  geom.dl_distance = config.dl_distance;
  geom.ul_distance = config.ul_distance;
  geom.dl_exponent = config.dl_exponent;
  geom.ul_exponent = config.ul_exponent;
  write_sweep(sim::sweep_initial_energy(geom, base, config.sweep_energies, config.sweep_periods, config.seed), config,
              out);
  return kExitOk;
}

int cmd_sweep_devices(const RunConfig& config, int jobs, std::ostream& out) {
  const sim::EnsembleSpec spec = build_ensemble(config);
  write_sweep(sim::sweep_devices(spec, config.sweep_devices, config.trials, config.seed, jobs).summary, config, out);
  return kExitOk;
}

int cmd_sweep_antennas(const RunConfig& config, int jobs, std::ostream& out) {
  const sim::EnsembleSpec spec = build_ensemble(config);
  write_sweep(sim::sweep_antennas(spec, config.sweep_antennas, config.trials, config.seed, jobs).summary, config, out);
  return kExitOk;
}

// Random K in {1, 2}, M = 1 instances with initial energies log-uniform in
// [1e-8, 1e-4] J so that both WPT modes occur.
int cmd_verify(const RunConfig& config, std::ostream& out) {
  const sim::EnsembleSpec spec = build_ensemble(config);
  oracle::GridSpec grid;
  grid.tau0_points = config.tau0_points;
  grid.tau_points = config.tau_points;
  grid.refinement_rounds = config.refinement_rounds;

  double max_gap = -INFINITY;
  double min_gap = INFINITY;
  double worst = 0.0;
  int worst_index = 0;
  int agree = 0;
  for (int i = 0; i < config.verify_instances; ++i) {
    SystemInstance sys = sim::ensemble_instance(spec, 1 + i % 2, 1, config.seed, i);
    sim::CounterRng energy = sim::CounterRng(config.seed).substream(static_cast<std::uint64_t>(i)).substream(
        kVerifyEnergyStream);
    for (auto& d : sys.devices) d.initial_energy = std::pow(10.0, energy.uniform(-8.0, -4.0));
    const oracle::Verification v = oracle::verify(sys, grid);
    max_gap = std::max(max_gap, v.rel_gap);
    min_gap = std::min(min_gap, v.rel_gap);
    if (std::abs(v.rel_gap) > worst) {
      worst = std::abs(v.rel_gap);
      worst_index = i;
    }
    agree += (v.kkt.tau0 > 0.0) == (v.grid.tau0 > 0.0);
  }
  const bool pass = worst <= kVerifyGapTol;
  out << "instances=" << config.verify_instances << "\n";
  out << "max_gap=" << num(max_gap) << "\n";
  out << "min_gap=" << num(min_gap) << "\n";
  out << "max_abs_gap=" << num(worst) << " (instance " << worst_index << ")\n";
  out << "activation_agreement=" << agree << "/" << config.verify_instances << "\n";
  out << "result=" << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitOk : kExitSolverError;
}

}  // namespace

int run(const std::string& subcommand, const RunConfig& config, int jobs, std::ostream& out, std::ostream& err) {
  const std::map<std::string, std::function<int()>> commands = {
      {"solve", [&] { return cmd_solve(config, out); }},
      {"activation", [&] { return cmd_activation(config, out); }},
      {"sweep-energy", [&] { return cmd_sweep_energy(config, out); }},
      {"sweep-devices", [&] { return cmd_sweep_devices(config, jobs, out); }},
      {"sweep-antennas", [&] { return cmd_sweep_antennas(config, jobs, out); }},
      {"verify", [&] { return cmd_verify(config, out); }},
  };
  const auto it = commands.find(subcommand);
  if (it == commands.end()) {
    err << "error: unknown subcommand '" << subcommand << "'\n";
    return kExitConfigError;
  }
  try {
    config.validate();
    return it->second();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolverError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolverError;
  }
}

}  // namespace wpcn
