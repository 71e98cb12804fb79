#pragma once

namespace wpcn {

/// 10^((level - 30) / 10).
double dbm_to_watts(double level_dbm);
double watts_to_dbm(double watts);

/// Large-scale channel power gain 1e-3 * rho_sq * d^-alpha.
/// Throws std::domain_error for d <= 0, alpha <= 0 or rho_sq < 0.
double pathloss_gain(double rho_sq, double distance_m, double alpha);

}  // namespace wpcn
