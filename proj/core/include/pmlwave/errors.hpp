#pragma once

#include <stdexcept>
#include <string>

namespace pmlwave {

// Invalid user-supplied configuration: bad polynomial degree, a spacing that
// does not divide the domain, an ill-posed PML layer, a malformed config key.
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A documented precondition was violated by the caller (programming error,
// not user input): reference coordinate outside [-1,1], mismatched sizes, ...
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// Numerical breakdown at runtime (NaN/Inf in the state). Carries the first
// offending location so runs can report where and when they died. The CLI
// maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string& what, int element, std::string field,
                 double time_s)
      : std::runtime_error(what + " (element " + std::to_string(element) +
                           ", field " + field + ", t = " +
                           std::to_string(time_s) + " s)"),
        element(element), field(std::move(field)), time_s(time_s) {}

  int element;
  std::string field;
  double time_s;
};

} // namespace pmlwave
