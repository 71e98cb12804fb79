#include "wpcn/simkit.hpp"
#include "wpcn/units.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wpcn::sim {

namespace {

constexpr std::uint64_t kUplinkStream = ~0ULL;
constexpr std::uint64_t kGeometryStream = 0;
constexpr std::uint64_t kChannelStream = 1;

}  // namespace

void GeometrySpec::validate() const {
  if (dl_distance.size() != ul_distance.size())
    throw std::invalid_argument("GeometrySpec: dl_distance and ul_distance differ in length");
  for (std::size_t k = 0; k < dl_distance.size(); ++k) {
    if (!(dl_distance[k] > 0.0) || !(ul_distance[k] > 0.0))
      throw std::invalid_argument("GeometrySpec: distance of device " + std::to_string(k + 1) + " must be positive");
  }
  if (!(dl_exponent > 0.0) || !(ul_exponent > 0.0))
    throw std::invalid_argument("GeometrySpec: path-loss exponents must be positive");
}

SystemInstance sample_instance(const GeometrySpec& geom, const SystemInstance& base, const CounterRng& stream,
                               bool deterministic) {
  geom.validate();
  if (base.devices.size() != geom.dl_distance.size())
    throw std::invalid_argument("sample_instance: geometry has " + std::to_string(geom.dl_distance.size()) +
                                " devices but the template has " + std::to_string(base.devices.size()));
  if (base.num_antennas < 1) throw std::invalid_argument("sample_instance: need at least one antenna");

  SystemInstance sys = base;
  for (std::size_t k = 0; k < sys.devices.size(); ++k) {
    DeviceProfile& d = sys.devices[k];
    const CounterRng device_stream = stream.substream(k);
    d.dl_channel.resize(sys.num_antennas);
    for (int m = 0; m < sys.num_antennas; ++m) {
      CounterRng draw = device_stream.substream(static_cast<std::uint64_t>(m));
      // both draws are always taken so phases agree across modes
      const double rho_sq = draw.exponential();
      const double phase = draw.uniform(0.0, 2.0 * std::numbers::pi);
      const double gain = pathloss_gain(deterministic ? 1.0 : rho_sq, geom.dl_distance[k], geom.dl_exponent);
      d.dl_channel(m) = std::polar(std::sqrt(gain), phase);
    }
    CounterRng ul = device_stream.substream(kUplinkStream);
    const double rho_ul = ul.exponential();
    d.ul_gain_normalized =
        pathloss_gain(deterministic ? 1.0 : rho_ul, geom.ul_distance[k], geom.ul_exponent) / sys.noise_power;
  }
  sys.validate();
  return sys;
}

SystemInstance sample_instance(const GeometrySpec& geom, const SystemInstance& base, std::uint64_t seed,
                               bool deterministic) {
  return sample_instance(geom, base, CounterRng(seed), deterministic);
}

void EnsembleSpec::validate() const {
  if (num_devices < 1) throw std::invalid_argument("EnsembleSpec: num_devices must be at least 1");
  if (!(dl_min > 0.0) || !(dl_max >= dl_min)) throw std::invalid_argument("EnsembleSpec: need 0 < dl_min <= dl_max");
  if (!(ul_distance > 0.0)) throw std::invalid_argument("EnsembleSpec: ul_distance must be positive");
  if (!(dl_exponent > 0.0) || !(ul_exponent > 0.0))
    throw std::invalid_argument("EnsembleSpec: path-loss exponents must be positive");
  if (!(fixed_fraction > 0.0 && fixed_fraction < 1.0))
    throw std::invalid_argument("EnsembleSpec: fixed_fraction must lie in (0, 1)");
}

SystemInstance ensemble_instance(const EnsembleSpec& spec, int num_devices, int num_antennas, std::uint64_t seed,
                                 int trial) {
  if (num_devices < 1 || num_antennas < 1)
    throw std::invalid_argument("ensemble_instance: need at least one device and one antenna");
  const CounterRng root = CounterRng(seed).substream(static_cast<std::uint64_t>(trial));
  const CounterRng placement = root.substream(kGeometryStream);

  GeometrySpec geom;
  geom.dl_exponent = spec.dl_exponent;
  geom.ul_exponent = spec.ul_exponent;
  for (int k = 0; k < num_devices; ++k) {
    CounterRng draw = placement.substream(static_cast<std::uint64_t>(k));
    geom.dl_distance.push_back(draw.uniform(spec.dl_min, spec.dl_max));
    geom.ul_distance.push_back(spec.ul_distance);
  }
  SystemInstance base = spec.base;
  base.num_antennas = num_antennas;
  base.devices.assign(static_cast<std::size_t>(num_devices), spec.device);
  return sample_instance(geom, base, root.substream(kChannelStream), false);
}

}  // namespace wpcn::sim
