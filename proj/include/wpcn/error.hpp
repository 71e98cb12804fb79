#pragma once

#include <stdexcept>
#include <string>

namespace wpcn {

/// Raised when a solver cannot produce an allocation for a valid-looking
/// instance (bracket overflow, infeasible candidate, unsupported shape).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed or out-of-range configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wpcn
