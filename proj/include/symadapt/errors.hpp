#pragma once

#include <stdexcept>
#include <string>

namespace symadapt {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: unknown names, malformed configs, invalid parameters. CLI exit 2.
struct ConfigError : Error {
  using Error::Error;
};

// Numeric failure: integration blow-up, solver non-convergence. CLI exit 3.
struct NumericError : Error {
  using Error::Error;
};

// Trajectory left the open state domain.
struct DomainExitError : NumericError {
  DomainExitError(const std::string& what, double t) : NumericError(what), t_exit(t) {}
  double t_exit;
};

}  // namespace symadapt
