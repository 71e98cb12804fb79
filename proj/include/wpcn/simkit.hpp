#pragma once

#include "wpcn/model.hpp"
#include "wpcn/rng.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wpcn::sim {

struct GeometrySpec {
  std::vector<double> dl_distance;  ///< m, one per device
  std::vector<double> ul_distance;  ///< m, one per device
  double dl_exponent = 2.2;
  double ul_exponent = 3.0;

  /// Throws std::invalid_argument on size mismatch or non-positive values.
  void validate() const;
};

/// Fills the channels of `base.devices` (one per geometry entry; their other
/// fields are kept). Each DL antenna entry has power pathloss(rho2, d, alpha)
/// and a uniform phase; the UL gain is pathloss(rho2, d_ul, alpha_ul) / noise.
/// rho2 is unit-mean exponential, or 1 when `deterministic` (phases stay
/// random). Device k and antenna m always read the same substream, so
/// instances with fewer devices or antennas are prefixes of larger ones.
SystemInstance sample_instance(const GeometrySpec& geom, const SystemInstance& base, const CounterRng& stream,
                               bool deterministic = false);
SystemInstance sample_instance(const GeometrySpec& geom, const SystemInstance& base, std::uint64_t seed,
                               bool deterministic = false);

struct Series {
  std::string name;
  std::vector<double> values;

  bool operator==(const Series&) const = default;
};

struct SweepResult {
  std::string axis_name;
  std::vector<double> axis_values;
  std::vector<Series> series;
  int trials = 1;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;

  const Series& find(std::string_view name) const;  ///< throws std::out_of_range
  bool operator==(const SweepResult&) const = default;
};

/// Common setup for the WSR comparisons: devices share `device` (weight,
/// efficiency, circuit power, initial energy) and sit uniformly between
/// dl_min and dl_max from the PS.
struct EnsembleSpec {
  SystemInstance base;  ///< antennas, P_max, period, noise; devices ignored
  DeviceProfile device;
  int num_devices = 5;  ///< used when K is not the swept axis
  double dl_min = 5.0;
  double dl_max = 10.0;
  double ul_distance = 90.0;
  double dl_exponent = 2.2;
  double ul_exponent = 3.0;
  double fixed_fraction = 0.5;

  void validate() const;
};

/// T-normalised WSR of the three schemes on one instance.
struct SchemeWsr {
  double optimal = 0.0;
  double isotropic = 0.0;
  double fixed_tau0 = 0.0;
};

SchemeWsr evaluate_trial(const SystemInstance& sys, double fixed_fraction);

/// Instance for one trial: the same trial index gives the same distances,
/// fading and phases for every device/antenna that exists at both sizes.
SystemInstance ensemble_instance(const EnsembleSpec& spec, int num_devices, int num_antennas, std::uint64_t seed,
                                 int trial);

struct ComparisonSweep {
  SweepResult summary;  ///< <scheme>_mean and <scheme>_stderr per axis value
  std::vector<std::vector<SchemeWsr>> samples;  ///< [axis index][trial]
};

/// WSR/T of optimal, isotropic and fixed-tau0 versus K. Trials run on `jobs`
/// threads; results do not depend on `jobs`.
ComparisonSweep sweep_devices(const EnsembleSpec& spec, const std::vector<int>& k_values, int trials,
                              std::uint64_t seed, int jobs = 1);

/// As sweep_devices, versus M with spec.num_devices devices.
ComparisonSweep sweep_antennas(const EnsembleSpec& spec, const std::vector<int>& m_values, int trials,
                               std::uint64_t seed, int jobs = 1);

/// Optimal tau0 and every p_k over an (E_I, T) grid for one instance drawn
/// from `geom` in deterministic mode. Series are tau0_T<T> and p<k>_T<T>.
SweepResult sweep_initial_energy(const GeometrySpec& geom, const SystemInstance& base,
                                 const std::vector<double>& energies, const std::vector<double>& periods,
                                 std::uint64_t seed);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// CSV text: "# seed=<u64> config_hash=<16 hex> trials=<n>", a header with
/// the axis name followed by the series names, then one row per axis value
/// at 17 significant digits.
std::string to_csv(const SweepResult& result);

/// Inverse of to_csv. Throws std::invalid_argument on malformed input.
SweepResult parse_csv(std::string_view text);

/// Writes to_csv(result) to `path`, replacing any existing file.
/// Throws std::runtime_error naming the path on I/O failure.
void emit(const SweepResult& result, const std::string& path);

}  // namespace wpcn::sim
