#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evocalc {

enum class ErrorKind {
  kIncompatibleGrids,
  kUnsupportedOrder,
  kRequiresSpectralRoute,
  kFunctionEvaluation,
  kDomain,
  kPrecondition,
  kElimination,
  kSingularSystem,
  kReductionUnsupported,
  kOracleUnavailable,
  kMisuse,
  kInvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// Every failure names the module that owns the violated invariant so the CLI
// can surface it verbatim.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, std::string message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

// Raised by the per-frequency solvers; carries the offending frequency.
class NumericalError : public Error {
 public:
  NumericalError(ErrorKind kind, std::string module, std::string message, double xi,
                 double condition_estimate);

  double xi() const noexcept { return xi_; }
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double xi_;
  double condition_estimate_;
};

}  // namespace evocalc
