#pragma once

#include "wpcn/config.hpp"

#include <ostream>
#include <string>

namespace wpcn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolverError = 1;
inline constexpr int kExitConfigError = 2;

/// Runs one of: solve, activation, sweep-energy, sweep-devices,
/// sweep-antennas, verify. Sweeps write CSV to config.out, or to `out` when
/// no path is set. Errors go to `err`; the return value is the exit status.
int run(const std::string& subcommand, const RunConfig& config, int jobs, std::ostream& out, std::ostream& err);

}  // namespace wpcn
