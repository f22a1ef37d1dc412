#include "evocalc/error.hpp"

#include <utility>

namespace evocalc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIncompatibleGrids: return "incompatible-grids";
    case ErrorKind::kUnsupportedOrder: return "unsupported-order";
    case ErrorKind::kRequiresSpectralRoute: return "requires-spectral-route";
    case ErrorKind::kFunctionEvaluation: return "function-evaluation";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kElimination: return "elimination";
    case ErrorKind::kSingularSystem: return "singular-system";
    case ErrorKind::kReductionUnsupported: return "reduction-unsupported";
    case ErrorKind::kOracleUnavailable: return "oracle-unavailable";
    case ErrorKind::kMisuse: return "misuse";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, std::string module, std::string message)
    : std::runtime_error(module + ": " + message), kind_(kind), module_(std::move(module)) {}

NumericalError::NumericalError(ErrorKind kind, std::string module, std::string message,
                               double xi, double condition_estimate)
    : Error(kind, std::move(module), std::move(message)),
      xi_(xi),
      condition_estimate_(condition_estimate) {}

}  // namespace evocalc
