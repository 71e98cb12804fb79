#include "wpcn/cli.hpp"
#include "wpcn/error.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <thread>

int main(int argc, char** argv) {
  CLI::App app{"Weighted-sum-rate resource allocation for wireless powered networks"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::uint64_t seed = 0;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out_path;
  bool deterministic = false;

  const std::pair<const char*, const char*> commands[] = {
      {"solve", "Optimal allocation for one instance"},
      {"activation", "WPT activation test with the virtual powers"},
      {"sweep-energy", "Optimal tau0 and powers over initial energy and period (CSV)"},
      {"sweep-devices", "WSR of optimal and benchmark schemes versus K (CSV)"},
      {"sweep-antennas", "WSR of optimal and benchmark schemes versus M (CSV)"},
      {"verify", "Compare the solver with a brute-force grid on small instances"},
  };
  std::vector<CLI::Option*> seed_opts;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    seed_opts.push_back(sub->add_option("--seed", seed, "Random seed (overrides the config)"));
    sub->add_option("--jobs", jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_path, "CSV output path (overrides the config)");
    sub->add_flag("--deterministic-fading", deterministic, "Fix fading powers to one");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? wpcn::kExitOk : wpcn::kExitConfigError;
  }

  wpcn::RunConfig config;
  try {
    config = config_path.empty() ? wpcn::parse_config_text("{}") : wpcn::parse_config(config_path);
  } catch (const wpcn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return wpcn::kExitConfigError;
  }
  for (const CLI::Option* o : seed_opts)
    if (o->count() > 0) config.seed = seed;
  if (!out_path.empty()) config.out = out_path;
  if (deterministic) config.deterministic_fading = true;

  return wpcn::run(app.get_subcommands().front()->get_name(), config, jobs, std::cout, std::cerr);
}
