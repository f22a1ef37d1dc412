#pragma once

#include "json.hpp"
#include <optional>
#include <string>

#include "evocalc/evocalc.hpp"

namespace evocalc::cli {

inline constexpr int kSchemaVersion = 1;

// Config problems name the offending key path as the violated invariant.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, std::string message)
      : Error(ErrorKind::kInvalidArgument, "cli", path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct Overrides {
  std::optional<double> nu;
  std::optional<std::size_t> nt;
  std::optional<std::size_t> nx;
  std::optional<std::uint64_t> seed;
};

/**
 * Parsed scenario. `resolved` is the input with every default filled in and
 * overrides applied; dumping it and parsing it again yields the same scenario.
 */
struct Scenario {
  nlohmann::json resolved;
  TimeGrid tgrid{0.0, 1.0, 2, 1.0};
  SpatialGrid sgrid{4};
  Coefficients coeffs;
  ImpedanceLaw imp;
  WeightedSignal source{tgrid, 3};
  ProblemTolerances tolerances;
  double tol_causality = 1e-7;
  double tol_accr = 1e-8;
  double tol_compare = 1e-8;
  std::uint64_t seed = 1;
  std::size_t accretivity_trials = 0;
  std::size_t time_stride = 1;

  EvoProblem problem() const { return EvoProblem(tgrid, sgrid, coeffs, imp, source, tolerances); }
};

nlohmann::json resolve(const nlohmann::json& input, const Overrides& overrides);
Scenario build_scenario(const nlohmann::json& resolved);

}  // namespace evocalc::cli
