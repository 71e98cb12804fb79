#include <doctest.h>

#include "wpcn/simkit.hpp"
#include "wpcn/units.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

using namespace wpcn;
using namespace wpcn::sim;

namespace {

SystemInstance template_instance(int k_count, int m_count) {
  SystemInstance base;
  base.num_antennas = m_count;
  base.p_max = dbm_to_watts(40.0);
  base.noise_power = dbm_to_watts(-117.0);
  base.period = 0.05;
  for (int k = 1; k <= k_count; ++k) {
    DeviceProfile d;
    d.circuit_power = 0.05e-3 * k;
    base.devices.push_back(d);
  }
  return base;
}

GeometrySpec fixed_geometry(int k_count, double dl = 10.0, double ul = 90.0) {
  GeometrySpec g;
  g.dl_distance.assign(static_cast<std::size_t>(k_count), dl);
  g.ul_distance.assign(static_cast<std::size_t>(k_count), ul);
  return g;
}

EnsembleSpec small_ensemble() {
  EnsembleSpec spec;
  spec.base = template_instance(0, 2);
  spec.base.period = 0.1;
  spec.device.circuit_power = 1e-4;
  spec.device.initial_energy = 1e-6;
  return spec;
}

}  // namespace

TEST_CASE("counter rng is addressable and well spread") {
  CounterRng a(7), b(7), c(8);
  CHECK(a() == b());
  CHECK(a.substream(3)() == b.substream(3)());
  CHECK(a.substream(3)() != a.substream(4)());
  CHECK(CounterRng(7)() != c());

  CounterRng r(1);
  double sum = 0.0;
  double sum_exp = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum_exp += r.exponential();
  }
  CHECK(sum / 1e5 == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sum_exp / 1e5 == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("sample_instance is deterministic for a seed") {
  const auto base = template_instance(3, 4);
  const auto geom = fixed_geometry(3);
  const SystemInstance a = sample_instance(geom, base, 42);
  const SystemInstance b = sample_instance(geom, base, 42);
  const SystemInstance c = sample_instance(geom, base, 43);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(a.devices[k].dl_channel == b.devices[k].dl_channel);
    CHECK(a.devices[k].ul_gain_normalized == b.devices[k].ul_gain_normalized);
    CHECK(a.devices[k].dl_channel != c.devices[k].dl_channel);
    CHECK(a.devices[k].circuit_power == base.devices[k].circuit_power);
  }
}

TEST_CASE("deterministic mode fixes the fading power to one") {
  const auto base = template_instance(2, 4);
  const SystemInstance sys = sample_instance(fixed_geometry(2), base, 5, true);
  for (const auto& d : sys.devices) {
    for (int m = 0; m < 4; ++m) CHECK(std::norm(d.dl_channel(m)) == doctest::Approx(std::pow(10.0, -5.2)).epsilon(1e-12));
    CHECK(d.ul_gain_normalized == doctest::Approx(pathloss_gain(1.0, 90.0, 3.0) / base.noise_power).epsilon(1e-12));
  }
  // phases are still random
  CHECK(std::arg(sys.devices[0].dl_channel(0)) != std::arg(sys.devices[0].dl_channel(1)));
}

TEST_CASE("sampled fading power has unit mean") {
  const auto base = template_instance(1, 1);
  const auto geom = fixed_geometry(1, 10.0, 90.0);
  const double scale = pathloss_gain(1.0, 10.0, 2.2);
  double sum = 0.0;
  for (std::uint64_t s = 0; s < 1000; ++s) sum += std::norm(sample_instance(geom, base, s).devices[0].dl_channel(0)) / scale;
  CHECK(sum / 1000.0 == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("ensemble instances are nested in K and M") {
  const EnsembleSpec spec = small_ensemble();
  const SystemInstance big = ensemble_instance(spec, 6, 5, 9, 3);
  const SystemInstance few = ensemble_instance(spec, 3, 5, 9, 3);
  const SystemInstance narrow = ensemble_instance(spec, 6, 2, 9, 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(few.devices[k].dl_channel == big.devices[k].dl_channel);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(narrow.devices[k].dl_channel == big.devices[k].dl_channel.head(2));
    CHECK(narrow.devices[k].ul_gain_normalized == big.devices[k].ul_gain_normalized);
  }
  const SystemInstance other_trial = ensemble_instance(spec, 6, 5, 9, 4);
  CHECK(other_trial.devices[0].dl_channel != big.devices[0].dl_channel);
}

TEST_CASE("geometry validation") {
  GeometrySpec g = fixed_geometry(2);
  g.ul_distance.pop_back();
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = fixed_geometry(2);
  g.dl_distance[1] = 0.0;
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("device 2"), std::invalid_argument);
  g = fixed_geometry(2);
  g.dl_exponent = -1.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  CHECK_THROWS_AS(sample_instance(fixed_geometry(3), template_instance(2, 2), 1), std::invalid_argument);
}

TEST_CASE("csv round trip and format") {
  SweepResult r;
  r.axis_name = "K";
  r.axis_values = {1.0, 2.0, 3.0};
  r.series = {{"optimal_mean", {0.1, 1.0 / 3.0, 1e-300}}, {"optimal_stderr", {0.0, 2.5e-17, 7.0}}};
  r.trials = 12;
  r.seed = 18446744073709551615ULL;
  r.config_hash = 0x00ab00cd00ef0012ULL;
  const std::string text = to_csv(r);
  std::istringstream lines(text);
  std::string first, header, row;
  std::getline(lines, first);
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(first == "# seed=18446744073709551615 config_hash=00ab00cd00ef0012 trials=12");
  CHECK(header == "K,optimal_mean,optimal_stderr");
  CHECK(row == "1,0.10000000000000001,0");
  CHECK(parse_csv(text) == r);
  CHECK(to_csv(r) == text);
}

TEST_CASE("csv with no rows is header only") {
  SweepResult r;
  r.axis_name = "M";
  r.series = {{"a", {}}};
  const std::string text = to_csv(r);
  CHECK(text == "# seed=0 config_hash=0000000000000000 trials=1\nM,a\n");
  CHECK(parse_csv(text) == r);
}

TEST_CASE("csv rejects malformed input") {
  CHECK_THROWS_AS(parse_csv(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_csv("seed=1\nK,a\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_csv("# seed=1 config_hash=0000000000000000 trials=1\nK,a\n1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_csv("# seed=1 config_hash=0000000000000000 trials=1\nK,a\n1,x\n"), std::invalid_argument);
  SweepResult bad;
  bad.axis_values = {1.0};
  bad.series = {{"a", {}}};
  CHECK_THROWS_AS(to_csv(bad), std::invalid_argument);
}

TEST_CASE("emit writes and overwrites, and names the path on failure") {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string path = (dir / "wpcn_test_emit.csv").string();
  SweepResult r;
  r.axis_name = "K";
  r.axis_values = {1.0};
  r.series = {{"a", {2.0}}};
  emit(r, path);
  r.series[0].values[0] = 3.0;
  emit(r, path);
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == to_csv(r));
  std::filesystem::remove(path);
  CHECK_THROWS_WITH_AS(emit(r, "/nonexistent-dir/x.csv"), doctest::Contains("/nonexistent-dir/x.csv"),
                       std::runtime_error);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("comparison sweeps are independent of the thread count") {
  const EnsembleSpec spec = small_ensemble();
  const ComparisonSweep one = sweep_devices(spec, {1, 3}, 4, 77, 1);
  const ComparisonSweep four = sweep_devices(spec, {1, 3}, 4, 77, 4);
  CHECK(to_csv(one.summary) == to_csv(four.summary));
  CHECK(one.summary.axis_name == "K");
  CHECK(one.summary.trials == 4);
  CHECK(one.summary.series.size() == 6);
  for (const auto& row : one.samples)
    for (const auto& s : row) {
      CHECK(s.optimal >= s.isotropic * (1.0 - 1e-9));
      CHECK(s.optimal >= s.fixed_tau0 * (1.0 - 1e-9));
    }
  const ComparisonSweep m = sweep_antennas(spec, {1, 2}, 3, 77, 3);
  CHECK(m.summary.axis_name == "M");
  // one antenna: isotropic is optimal
  for (const auto& s : m.samples[0]) CHECK(s.isotropic == doctest::Approx(s.optimal).epsilon(1e-7));
  CHECK_THROWS_AS(sweep_devices(spec, {1}, 0, 1), std::invalid_argument);
}

TEST_CASE("initial-energy sweep follows the activation structure") {
  const auto base = template_instance(5, 4);
  std::vector<double> energies;
  for (int i = 0; i <= 40; ++i) energies.push_back(1e-8 * std::pow(10.0, 3.0 * i / 40.0));
  const SweepResult r = sweep_initial_energy(fixed_geometry(5), base, energies, {0.05, 0.1}, 1);
  CHECK(r.axis_name == "initial_energy");
  CHECK(r.series.size() == 12);
  const auto& tau_short = r.find("tau0_T0.05").values;
  const auto& tau_long = r.find("tau0_T0.1").values;
  const auto& p1 = r.find("p1_T0.05").values;
  const auto& p1_long = r.find("p1_T0.1").values;
  CHECK(tau_short.front() > 0.0);
  CHECK(tau_short.back() == 0.0);
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (i > 0) CHECK(tau_short[i] <= tau_short[i - 1]);
    CHECK(tau_long[i] >= tau_short[i]);
    if (tau_short[i] > 0.0 && tau_long[i] > 0.0) CHECK(p1_long[i] == doctest::Approx(p1[i]).epsilon(1e-8));
  }
  CHECK_THROWS_AS(sweep_initial_energy(fixed_geometry(5), base, energies, {}, 1), std::invalid_argument);
}
