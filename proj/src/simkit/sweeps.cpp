#include "wpcn/benchmarks.hpp"
#include "wpcn/simkit.hpp"
#include "wpcn/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <stdexcept>
#include <thread>

namespace wpcn::sim {

namespace {

std::string compact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Runs task(i) for i in [0, count) on `jobs` threads. The first exception
// by task index is rethrown after all workers finish.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, jobs));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(threads, count); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void add_stats(std::vector<Series>& out, const std::string& name, const std::vector<std::vector<SchemeWsr>>& samples,
               double SchemeWsr::*field) {
  Series mean{name + "_mean", {}};
  Series err{name + "_stderr", {}};
  for (const auto& row : samples) {
    const double n = static_cast<double>(row.size());
    double sum = 0.0;
    for (const auto& s : row) sum += s.*field;
    const double m = sum / n;
    double ss = 0.0;
    for (const auto& s : row) ss += (s.*field - m) * (s.*field - m);
    mean.values.push_back(m);
    err.values.push_back(row.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0);
  }
  out.push_back(std::move(mean));
  out.push_back(std::move(err));
}

ComparisonSweep compare(const EnsembleSpec& spec, const std::string& axis, const std::vector<int>& values, int trials,
                        std::uint64_t seed, int jobs, const std::function<SystemInstance(int, int)>& make) {
  spec.validate();
  if (trials < 1) throw std::invalid_argument("sweep: trials must be at least 1");
  if (values.empty()) throw std::invalid_argument("sweep: empty " + axis + " list");

  ComparisonSweep out;
  out.samples.assign(values.size(), std::vector<SchemeWsr>(static_cast<std::size_t>(trials)));
  const auto per_axis = static_cast<std::size_t>(trials);
  parallel_for(values.size() * per_axis, jobs, [&](std::size_t i) {
    const std::size_t a = i / per_axis;
    const int t = static_cast<int>(i % per_axis);
    out.samples[a][static_cast<std::size_t>(t)] = evaluate_trial(make(values[a], t), spec.fixed_fraction);
  });

  SweepResult& s = out.summary;
  s.axis_name = axis;
  for (int v : values) s.axis_values.push_back(v);
  s.trials = trials;
  s.seed = seed;
  add_stats(s.series, "optimal", out.samples, &SchemeWsr::optimal);
  add_stats(s.series, "isotropic", out.samples, &SchemeWsr::isotropic);
  add_stats(s.series, "fixed_tau0", out.samples, &SchemeWsr::fixed_tau0);
  return out;
}

}  // namespace

const Series& SweepResult::find(std::string_view name) const {
  for (const auto& s : series)
    if (s.name == name) return s;
  throw std::out_of_range("SweepResult: no series named " + std::string(name));
}

SchemeWsr evaluate_trial(const SystemInstance& sys, double fixed_fraction) {
  SchemeWsr r;
  r.optimal = solve(sys).wsr / sys.period;
  r.isotropic = isotropic_solve(sys).solution.wsr / sys.period;
  r.fixed_tau0 = fixed_tau0_solve(sys, fixed_fraction).solution.wsr / sys.period;
  return r;
}

ComparisonSweep sweep_devices(const EnsembleSpec& spec, const std::vector<int>& k_values, int trials,
                              std::uint64_t seed, int jobs) {
  return compare(spec, "K", k_values, trials, seed, jobs, [&](int k, int t) {
    return ensemble_instance(spec, k, spec.base.num_antennas, seed, t);
  });
}

ComparisonSweep sweep_antennas(const EnsembleSpec& spec, const std::vector<int>& m_values, int trials,
                               std::uint64_t seed, int jobs) {
  return compare(spec, "M", m_values, trials, seed, jobs, [&](int m, int t) {
    return ensemble_instance(spec, spec.num_devices, m, seed, t);
  });
}

SweepResult sweep_initial_energy(const GeometrySpec& geom, const SystemInstance& base,
                                 const std::vector<double>& energies, const std::vector<double>& periods,
                                 std::uint64_t seed) {
  if (periods.empty()) throw std::invalid_argument("sweep_initial_energy: empty period list");
  for (double e : energies)
    if (!(e >= 0.0)) throw std::invalid_argument("sweep_initial_energy: initial energies must be >= 0");
  for (double t : periods)
    if (!(t > 0.0)) throw std::invalid_argument("sweep_initial_energy: periods must be positive");

  const SystemInstance drawn = sample_instance(geom, base, seed, true);
  const std::size_t k_count = drawn.devices.size();

  SweepResult out;
  out.axis_name = "initial_energy";
  out.axis_values = energies;
  out.seed = seed;
  for (double t : periods) {
    out.series.push_back({"tau0_T" + compact(t), {}});
    for (std::size_t k = 0; k < k_count; ++k) out.series.push_back({"p" + std::to_string(k + 1) + "_T" + compact(t), {}});
  }
  for (double e : energies) {
    std::size_t col = 0;
    for (double t : periods) {
      SystemInstance sys = drawn;
      sys.period = t;
      for (auto& d : sys.devices) d.initial_energy = e;
      const AllocationSolution sol = solve(sys);
      out.series[col++].values.push_back(sol.tau0);
      for (std::size_t k = 0; k < k_count; ++k) out.series[col++].values.push_back(sol.power[k]);
    }
  }
  return out;
}

}  // namespace wpcn::sim
