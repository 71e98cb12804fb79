#pragma once

#include "wpcn/hermitian.hpp"
#include "wpcn/model.hpp"
#include "wpcn/simkit.hpp"
#include "wpcn/units.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wpcn {

/// Everything a CLI run needs. Quantities are stored in SI units (W, J, s, m).
/// Per-device vectors always have num_devices entries after parsing.
struct RunConfig {
  int num_antennas = 4;
  double p_max = 10.0;  // 40 dBm
  double noise_power = dbm_to_watts(-117.0);
  double period = 0.05;

  int num_devices = 5;
  std::vector<double> weight;
  std::vector<double> harvest_efficiency;
  std::vector<double> circuit_power;
  std::vector<double> initial_energy;
  std::optional<std::vector<CVector>> dl_channels;  ///< explicit h_k
  std::optional<std::vector<double>> ul_gains;      ///< explicit |g_k|^2

  std::vector<double> dl_distance;  ///< used when channels are sampled
  std::vector<double> ul_distance;
  double dl_exponent = 2.2;
  double ul_exponent = 3.0;
  double dl_min = 5.0;  ///< random placement range for the WSR sweeps
  double dl_max = 10.0;

  std::vector<double> sweep_energies;
  std::vector<double> sweep_periods;
  std::vector<int> sweep_devices;
  std::vector<int> sweep_antennas;
  int trials = 200;
  double fixed_fraction = 0.5;

  int verify_instances = 100;
  int tau0_points = 101;
  int tau_points = 101;
  int refinement_rounds = 3;

  std::uint64_t seed = 1;
  bool deterministic_fading = false;
  std::string out;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses a JSON document. Scalars with a dimension need a unit suffix:
/// power "W", "mW", "uW" or "dBm"; energy "J", "mJ" or "uJ"; time "s" or
/// "ms"; distance "m". Unknown keys are rejected. Throws ConfigError.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

/// Canonical JSON with every field spelled out in SI units. Parsing it
/// yields an identical RunConfig.
std::string to_json(const RunConfig& config);

/// FNV-1a of the canonical JSON with the output path cleared.
std::uint64_t config_hash(const RunConfig& config);

/// The single instance described by the config: explicit channels when
/// given, otherwise drawn from the geometry with config.seed.
SystemInstance build_instance(const RunConfig& config);

/// Ensemble for the WSR comparisons. Per-device fields must be uniform.
sim::EnsembleSpec build_ensemble(const RunConfig& config);

}  // namespace wpcn
