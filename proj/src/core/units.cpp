#include "wpcn/units.hpp"

#include <cmath>
#include <stdexcept>

namespace wpcn {

double dbm_to_watts(double level_dbm) { return std::pow(10.0, (level_dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double pathloss_gain(double rho_sq, double distance_m, double alpha) {
  if (!(distance_m > 0.0)) throw std::domain_error("pathloss_gain: distance must be positive");
  if (!(alpha > 0.0)) throw std::domain_error("pathloss_gain: exponent must be positive");
  if (!(rho_sq >= 0.0)) throw std::domain_error("pathloss_gain: fading power must be non-negative");
  return 1e-3 * rho_sq * std::pow(distance_m, -alpha);
}

}  // namespace wpcn
