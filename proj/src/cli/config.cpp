#include "wpcn/config.hpp"

#include "wpcn/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace wpcn {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

enum class Dim { kPower, kEnergy, kTime, kDistance };

[[noreturn]] void fail(const std::string& field, const std::string& what) { throw ConfigError(field + ": " + what); }

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(where.empty() ? "config" : where, "expected an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) fail(where.empty() ? key : where + "." + key, "unknown key");
}

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

double quantity(const json& v, const std::string& field, Dim dim) {
  static const char* const kExpected[] = {"a power such as \"40 dBm\" or \"0.1 mW\"",
                                          "an energy such as \"2.4 uJ\"", "a time such as \"50 ms\"",
                                          "a distance such as \"10 m\""};
  const std::string expected = std::string("expected ") + kExpected[static_cast<int>(dim)];
  if (!v.is_string()) fail(field, expected);
  const std::string text = v.get<std::string>();
  const char* begin = text.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end == begin || !std::isfinite(x)) fail(field, expected + ", got \"" + text + "\"");
  std::string unit(end);
  while (!unit.empty() && unit.front() == ' ') unit.erase(unit.begin());
  switch (dim) {
    case Dim::kPower:
      if (unit == "W") return x;
      if (unit == "mW") return x * 1e-3;
      if (unit == "uW") return x * 1e-6;
      if (unit == "dBm") return dbm_to_watts(x);
      break;
    case Dim::kEnergy:
      if (unit == "J") return x;
      if (unit == "mJ") return x * 1e-3;
      if (unit == "uJ") return x * 1e-6;
      break;
    case Dim::kTime:
      if (unit == "s") return x;
      if (unit == "ms") return x * 1e-3;
      break;
    case Dim::kDistance:
      if (unit == "m") return x;
      break;
  }
  fail(field, expected + ", got \"" + text + "\"");
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  const auto i = v.get<std::int64_t>();
  if (i < -1000000000 || i > 1000000000) fail(field, "integer out of range");
  return static_cast<int>(i);
}

// Scalar (broadcast) or per-device array, each entry read with `one`.
template <class Read>
std::vector<double> per_device(const json& v, const std::string& field, std::size_t count, Read one) {
  if (!v.is_array()) return std::vector<double>(count, one(v, field));
  if (v.size() != count)
    fail(field, "has " + std::to_string(v.size()) + " entries but there are " + std::to_string(count) + " devices");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(one(v[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<double> quantity_list(const json& v, const std::string& field, Dim dim) {
  if (!v.is_array()) return {quantity(v, field, dim)};
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(quantity(v[i], field + "[" + std::to_string(i) + "]", dim));
  return out;
}

std::vector<int> int_list(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(integer(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

// Either an explicit list or {"from", "to", "points", "spacing"}.
std::vector<double> energy_axis(const json& v, const std::string& field) {
  if (!v.is_object()) return quantity_list(v, field, Dim::kEnergy);
  reject_unknown(v, field, {"from", "to", "points", "spacing"});
  for (const char* key : {"from", "to", "points"})
    if (!v.contains(key)) fail(join(field, key), "missing");
  const double from = quantity(v["from"], join(field, "from"), Dim::kEnergy);
  const double to = quantity(v["to"], join(field, "to"), Dim::kEnergy);
  const int points = integer(v["points"], join(field, "points"));
  std::string spacing = "log";
  if (v.contains("spacing")) {
    if (!v["spacing"].is_string()) fail(join(field, "spacing"), "expected \"log\" or \"linear\"");
    spacing = v["spacing"].get<std::string>();
  }
  if (points < 2) fail(join(field, "points"), "must be at least 2");
  if (spacing != "log" && spacing != "linear") fail(join(field, "spacing"), "expected \"log\" or \"linear\"");
  if (spacing == "log" && !(from > 0.0 && to > 0.0)) fail(field, "log spacing needs positive end points");
  std::vector<double> out;
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    out.push_back(spacing == "log" ? from * std::pow(to / from, t) : from + (to - from) * t);
  }
  return out;
}

CVector complex_vector(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of [re, im] pairs");
  CVector h(static_cast<Eigen::Index>(v.size()));
  for (std::size_t m = 0; m < v.size(); ++m) {
    const std::string f = field + "[" + std::to_string(m) + "]";
    if (!v[m].is_array() || v[m].size() != 2) fail(f, "expected [re, im]");
    h(static_cast<Eigen::Index>(m)) = Complex(number(v[m][0], f), number(v[m][1], f));
  }
  return h;
}

std::string with_unit(double x, const char* unit) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g %s", x, unit);
  return buf;
}

ordered_json unit_list(const std::vector<double>& xs, const char* unit) {
  ordered_json a = ordered_json::array();
  for (double x : xs) a.push_back(with_unit(x, unit));
  return a;
}

bool uniform(const std::vector<double>& xs) {
  for (double x : xs)
    if (x != xs.front()) return false;
  return true;
}

}  // namespace

void RunConfig::validate() const {
  if (num_antennas < 1) fail("system.num_antennas", "must be at least 1");
  if (!(p_max > 0.0)) fail("system.p_max", "must be positive");
  if (!(noise_power > 0.0)) fail("system.noise_power", "must be positive");
  if (!(period > 0.0)) fail("system.period", "must be positive");
  if (num_devices < 1) fail("devices.count", "must be at least 1");
  const auto k_count = static_cast<std::size_t>(num_devices);
  auto sized = [&](const std::vector<double>& v, const char* field) {
    if (v.size() != k_count) fail(field, "needs one entry per device");
  };
  sized(weight, "devices.weight");
  sized(harvest_efficiency, "devices.harvest_efficiency");
  sized(circuit_power, "devices.circuit_power");
  sized(initial_energy, "devices.initial_energy");
  sized(dl_distance, "geometry.dl_distance");
  sized(ul_distance, "geometry.ul_distance");
  for (std::size_t k = 0; k < k_count; ++k) {
    const std::string id = "[" + std::to_string(k) + "]";
    if (!(weight[k] >= 0.0)) fail("devices.weight" + id, "must be >= 0");
    if (!(harvest_efficiency[k] > 0.0 && harvest_efficiency[k] <= 1.0))
      fail("devices.harvest_efficiency" + id, "must lie in (0, 1]");
    if (!(circuit_power[k] >= 0.0)) fail("devices.circuit_power" + id, "must be >= 0");
    if (!(initial_energy[k] >= 0.0)) fail("devices.initial_energy" + id, "must be >= 0");
    if (!(dl_distance[k] > 0.0)) fail("geometry.dl_distance" + id, "must be positive");
    if (!(ul_distance[k] > 0.0)) fail("geometry.ul_distance" + id, "must be positive");
  }
  if (dl_channels.has_value() != ul_gains.has_value())
    fail("devices.dl_channels", "dl_channels and ul_gains must be given together");
  if (dl_channels) {
    if (dl_channels->size() != k_count) fail("devices.dl_channels", "needs one channel per device");
    for (std::size_t k = 0; k < k_count; ++k)
      if ((*dl_channels)[k].size() != num_antennas)
        fail("devices.dl_channels[" + std::to_string(k) + "]", "needs num_antennas entries");
    if (ul_gains->size() != k_count) fail("devices.ul_gains", "needs one entry per device");
    for (double g : *ul_gains)
      if (!(g >= 0.0)) fail("devices.ul_gains", "must be >= 0");
  }
  if (!(dl_exponent > 0.0)) fail("geometry.dl_exponent", "must be positive");
  if (!(ul_exponent > 0.0)) fail("geometry.ul_exponent", "must be positive");
  if (!(dl_min > 0.0 && dl_max >= dl_min)) fail("geometry.dl_range", "needs 0 < min <= max");
  for (double e : sweep_energies)
    if (!(e >= 0.0)) fail("sweep.energies", "must be >= 0");
  for (double t : sweep_periods)
    if (!(t > 0.0)) fail("sweep.periods", "must be positive");
  for (int k : sweep_devices)
    if (k < 1) fail("sweep.devices", "entries must be at least 1");
  for (int m : sweep_antennas)
    if (m < 1) fail("sweep.antennas", "entries must be at least 1");
  if (trials < 1) fail("sweep.trials", "must be at least 1");
  if (!(fixed_fraction > 0.0 && fixed_fraction < 1.0)) fail("sweep.fixed_fraction", "must lie in (0, 1)");
  if (verify_instances < 1) fail("verify.instances", "must be at least 1");
  if (tau0_points < 2 || tau_points < 2) fail("verify.tau0_points", "grids need at least 2 points");
  if (refinement_rounds < 0) fail("verify.refinement_rounds", "must be >= 0");
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  reject_unknown(doc, "", {"system", "devices", "geometry", "sweep", "verify", "seed", "deterministic_fading", "out"});
  RunConfig c;
  const json empty = json::object();
  const json& sys = doc.contains("system") ? doc["system"] : empty;
  const json& dev = doc.contains("devices") ? doc["devices"] : empty;
  const json& geo = doc.contains("geometry") ? doc["geometry"] : empty;
  const json& swp = doc.contains("sweep") ? doc["sweep"] : empty;
  const json& ver = doc.contains("verify") ? doc["verify"] : empty;
  reject_unknown(sys, "system", {"num_antennas", "p_max", "noise_power", "period"});
  reject_unknown(dev, "devices",
                 {"count", "weight", "harvest_efficiency", "circuit_power", "initial_energy", "dl_channels", "ul_gains"});
  reject_unknown(geo, "geometry", {"dl_distance", "ul_distance", "dl_exponent", "ul_exponent", "dl_range"});
  reject_unknown(swp, "sweep", {"energies", "periods", "devices", "antennas", "trials", "fixed_fraction"});
  reject_unknown(ver, "verify", {"instances", "tau0_points", "tau_points", "refinement_rounds"});

  if (sys.contains("num_antennas")) c.num_antennas = integer(sys["num_antennas"], "system.num_antennas");
  if (sys.contains("p_max")) c.p_max = quantity(sys["p_max"], "system.p_max", Dim::kPower);
  if (sys.contains("noise_power")) c.noise_power = quantity(sys["noise_power"], "system.noise_power", Dim::kPower);
  if (sys.contains("period")) c.period = quantity(sys["period"], "system.period", Dim::kTime);

  // device count: explicit, else the first per-device array, else 5
  std::optional<std::size_t> count;
  if (dev.contains("count")) count = static_cast<std::size_t>(std::max(0, integer(dev["count"], "devices.count")));
  for (const auto& [section, key] :
       {std::pair{&dev, "weight"}, std::pair{&dev, "harvest_efficiency"}, std::pair{&dev, "circuit_power"},
        std::pair{&dev, "initial_energy"}, std::pair{&dev, "dl_channels"}, std::pair{&dev, "ul_gains"},
        std::pair{&geo, "dl_distance"}, std::pair{&geo, "ul_distance"}}) {
    if (!count && section->contains(key) && (*section)[key].is_array()) count = (*section)[key].size();
  }
  c.num_devices = static_cast<int>(count.value_or(5));
  if (c.num_devices < 1) fail("devices.count", "must be at least 1");
  const auto k_count = static_cast<std::size_t>(c.num_devices);

  auto read = [&](const json& section, const std::string& where, const char* key, const json& fallback, auto one) {
    return per_device(section.contains(key) ? section[key] : fallback, join(where, key), k_count, one);
  };
  auto as_number = [](const json& v, const std::string& f) { return number(v, f); };
  auto as_power = [](const json& v, const std::string& f) { return quantity(v, f, Dim::kPower); };
  auto as_energy = [](const json& v, const std::string& f) { return quantity(v, f, Dim::kEnergy); };
  auto as_distance = [](const json& v, const std::string& f) { return quantity(v, f, Dim::kDistance); };
  c.weight = read(dev, "devices", "weight", 1.0, as_number);
  c.harvest_efficiency = read(dev, "devices", "harvest_efficiency", 0.5, as_number);
  c.circuit_power = read(dev, "devices", "circuit_power", "0.1 mW", as_power);
  c.initial_energy = read(dev, "devices", "initial_energy", "0 J", as_energy);
  if (dev.contains("dl_channels")) {
    const json& ch = dev["dl_channels"];
    if (!ch.is_array() || ch.size() != k_count) fail("devices.dl_channels", "needs one channel per device");
    std::vector<CVector> hs;
    for (std::size_t k = 0; k < k_count; ++k)
      hs.push_back(complex_vector(ch[k], "devices.dl_channels[" + std::to_string(k) + "]"));
    c.dl_channels = std::move(hs);
  }
  if (dev.contains("ul_gains")) {
    if (!dev["ul_gains"].is_array()) fail("devices.ul_gains", "expected an array of numbers");
    c.ul_gains = read(dev, "devices", "ul_gains", 0.0, as_number);
  }

  c.dl_distance = read(geo, "geometry", "dl_distance", "10 m", as_distance);
  c.ul_distance = read(geo, "geometry", "ul_distance", "90 m", as_distance);
  if (geo.contains("dl_exponent")) c.dl_exponent = number(geo["dl_exponent"], "geometry.dl_exponent");
  if (geo.contains("ul_exponent")) c.ul_exponent = number(geo["ul_exponent"], "geometry.ul_exponent");
  if (geo.contains("dl_range")) {
    const json& r = geo["dl_range"];
    if (!r.is_array() || r.size() != 2) fail("geometry.dl_range", "expected [min, max]");
    c.dl_min = quantity(r[0], "geometry.dl_range[0]", Dim::kDistance);
    c.dl_max = quantity(r[1], "geometry.dl_range[1]", Dim::kDistance);
  }

  c.sweep_energies = swp.contains("energies") ? energy_axis(swp["energies"], "sweep.energies")
                                              : energy_axis({{"from", "1e-8 J"}, {"to", "1e-5 J"}, {"points", 200}},
                                                            "sweep.energies");
  c.sweep_periods = swp.contains("periods") ? quantity_list(swp["periods"], "sweep.periods", Dim::kTime)
                                            : std::vector<double>{c.period};
  c.sweep_devices = swp.contains("devices") ? int_list(swp["devices"], "sweep.devices")
                                            : std::vector<int>{2, 3, 4, 5, 6, 7, 8, 9, 10};
  c.sweep_antennas = swp.contains("antennas") ? int_list(swp["antennas"], "sweep.antennas")
                                              : std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8};
  if (swp.contains("trials")) c.trials = integer(swp["trials"], "sweep.trials");
  if (swp.contains("fixed_fraction")) c.fixed_fraction = number(swp["fixed_fraction"], "sweep.fixed_fraction");

  if (ver.contains("instances")) c.verify_instances = integer(ver["instances"], "verify.instances");
  if (ver.contains("tau0_points")) c.tau0_points = integer(ver["tau0_points"], "verify.tau0_points");
  if (ver.contains("tau_points")) c.tau_points = integer(ver["tau_points"], "verify.tau_points");
  if (ver.contains("refinement_rounds"))
    c.refinement_rounds = integer(ver["refinement_rounds"], "verify.refinement_rounds");

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() >= 0))
      fail("seed", "expected a non-negative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("deterministic_fading")) {
    if (!doc["deterministic_fading"].is_boolean()) fail("deterministic_fading", "expected true or false");
    c.deterministic_fading = doc["deterministic_fading"].get<bool>();
  }
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) fail("out", "expected a path string");
    c.out = doc["out"].get<std::string>();
  }
  c.validate();
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string to_json(const RunConfig& c) {
  ordered_json doc;
  doc["system"] = {{"num_antennas", c.num_antennas},
                   {"p_max", with_unit(c.p_max, "W")},
                   {"noise_power", with_unit(c.noise_power, "W")},
                   {"period", with_unit(c.period, "s")}};
  ordered_json dev;
  dev["count"] = c.num_devices;
  dev["weight"] = c.weight;
  dev["harvest_efficiency"] = c.harvest_efficiency;
  dev["circuit_power"] = unit_list(c.circuit_power, "W");
  dev["initial_energy"] = unit_list(c.initial_energy, "J");
  if (c.dl_channels) {
    ordered_json chans = ordered_json::array();
    for (const CVector& h : *c.dl_channels) {
      ordered_json entries = ordered_json::array();
      for (Eigen::Index m = 0; m < h.size(); ++m) entries.push_back({h(m).real(), h(m).imag()});
      chans.push_back(entries);
    }
    dev["dl_channels"] = chans;
    dev["ul_gains"] = *c.ul_gains;
  }
  doc["devices"] = dev;
  doc["geometry"] = {{"dl_distance", unit_list(c.dl_distance, "m")},
                     {"ul_distance", unit_list(c.ul_distance, "m")},
                     {"dl_exponent", c.dl_exponent},
                     {"ul_exponent", c.ul_exponent},
                     {"dl_range", {with_unit(c.dl_min, "m"), with_unit(c.dl_max, "m")}}};
  doc["sweep"] = {{"energies", unit_list(c.sweep_energies, "J")},
                  {"periods", unit_list(c.sweep_periods, "s")},
                  {"devices", c.sweep_devices},
                  {"antennas", c.sweep_antennas},
                  {"trials", c.trials},
                  {"fixed_fraction", c.fixed_fraction}};
  doc["verify"] = {{"instances", c.verify_instances},
                   {"tau0_points", c.tau0_points},
                   {"tau_points", c.tau_points},
                   {"refinement_rounds", c.refinement_rounds}};
  doc["seed"] = c.seed;
  doc["deterministic_fading"] = c.deterministic_fading;
  doc["out"] = c.out;
  return doc.dump(2) + "\n";
}

std::uint64_t config_hash(const RunConfig& config) {
  RunConfig c = config;
  c.out.clear();
  return sim::fnv1a(to_json(c));
}

SystemInstance build_instance(const RunConfig& c) {
  c.validate();
  SystemInstance sys;
  sys.num_antennas = c.num_antennas;
  sys.p_max = c.p_max;
  sys.period = c.period;
  sys.noise_power = c.noise_power;
  for (int k = 0; k < c.num_devices; ++k) {
    DeviceProfile d;
    d.weight = c.weight[k];
    d.harvest_efficiency = c.harvest_efficiency[k];
    d.circuit_power = c.circuit_power[k];
    d.initial_energy = c.initial_energy[k];
    sys.devices.push_back(d);
  }
  if (c.dl_channels) {
    for (std::size_t k = 0; k < sys.devices.size(); ++k) {
      sys.devices[k].dl_channel = (*c.dl_channels)[k];
      sys.devices[k].ul_gain_normalized = (*c.ul_gains)[k] / c.noise_power;
    }
    sys.validate();
    return sys;
  }
  sim::GeometrySpec geom;
  geom.dl_distance = c.dl_distance;
  geom.ul_distance = c.ul_distance;
  geom.dl_exponent = c.dl_exponent;
  geom.ul_exponent = c.ul_exponent;
  return sim::sample_instance(geom, sys, c.seed, c.deterministic_fading);
}

sim::EnsembleSpec build_ensemble(const RunConfig& c) {
  c.validate();
  for (const auto& [values, field] :
       {std::pair{&c.weight, "devices.weight"}, std::pair{&c.harvest_efficiency, "devices.harvest_efficiency"},
        std::pair{&c.circuit_power, "devices.circuit_power"}, std::pair{&c.initial_energy, "devices.initial_energy"},
        std::pair{&c.ul_distance, "geometry.ul_distance"}}) {
    if (!uniform(*values)) fail(field, "must be the same for every device in WSR sweeps");
  }
  if (c.dl_channels) fail("devices.dl_channels", "WSR sweeps draw their own channels");
  sim::EnsembleSpec spec;
  spec.base.num_antennas = c.num_antennas;
  spec.base.p_max = c.p_max;
  spec.base.period = c.period;
  spec.base.noise_power = c.noise_power;
  spec.device.weight = c.weight.front();
  spec.device.harvest_efficiency = c.harvest_efficiency.front();
  spec.device.circuit_power = c.circuit_power.front();
  spec.device.initial_energy = c.initial_energy.front();
  spec.num_devices = c.num_devices;
  spec.dl_min = c.dl_min;
  spec.dl_max = c.dl_max;
  spec.ul_distance = c.ul_distance.front();
  spec.dl_exponent = c.dl_exponent;
  spec.ul_exponent = c.ul_exponent;
  spec.fixed_fraction = c.fixed_fraction;
  spec.validate();
  return spec;
}

}  // namespace wpcn
