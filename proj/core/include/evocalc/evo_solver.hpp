#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "evocalc/spatial_system.hpp"
#include "evocalc/weighted_time.hpp"

namespace evocalc {

enum class Field : std::size_t { kS = 0, kW = 1, kV = 2 };

// Channel of (field, node) in a space-time source with 3 nx channels.
inline std::size_t source_channel(Field f, std::size_t node, std::size_t nx) {
  return static_cast<std::size_t>(f) * nx + node;
}

WeightedSignal make_source(const TimeGrid& tgrid, const SpatialGrid& sgrid);

struct ProblemTolerances {
  double c0 = 1e-10;         // required material margin
  double eps_alias = 1e-8;   // bound on e^{-nu T}
  double residual = 1e-10;   // per-frequency relative residual
};

class EvoProblem {
 public:
  // Validates the coefficient fields, the material margin, the impedance
  // admissibility and the aliasing bound; throws Error on any violation.
  EvoProblem(TimeGrid tgrid, SpatialGrid sgrid, Coefficients coeffs, ImpedanceLaw imp, WeightedSignal source,
             ProblemTolerances tol = {});

  const TimeGrid& tgrid() const noexcept { return tgrid_; }
  const SpatialGrid& sgrid() const noexcept { return sgrid_; }
  const Coefficients& coeffs() const noexcept { return coeffs_; }
  const ImpedanceLaw& impedance() const noexcept { return imp_; }
  const WeightedSignal& source() const noexcept { return source_; }
  const ProblemTolerances& tolerances() const noexcept { return tol_; }
  double nu() const noexcept { return tgrid_.nu(); }

  double material_margin() const { return coeffs_.material_margin(nu()); }
  const AdmissibilityReport& admissibility() const noexcept { return admissibility_; }

  // Time of the first nonzero source sample; empty for a zero source.
  std::optional<double> source_onset() const;

  // Same problem with a different source.
  EvoProblem with_source(WeightedSignal source) const;

 private:
  TimeGrid tgrid_;
  SpatialGrid sgrid_;
  Coefficients coeffs_;
  ImpedanceLaw imp_;
  WeightedSignal source_;
  ProblemTolerances tol_;
  AdmissibilityReport admissibility_;
};

// Smallest nu in [lo, hi] at which the material margin reaches c0 and the
// impedance law is admissible; empty when no such nu exists in the range.
std::optional<double> estimate_nu_threshold(const Coefficients& coeffs, const ImpedanceLaw& imp, double c0,
                                            double lo = 1e-6, double hi = 1e6);

struct Diagnostics {
  double c0_material = 0.0;
  std::pair<double, double> impedance_margins{};  // (left, right)
  double causality_residual = 0.0;
  std::optional<double> causality_time;  // the a used for causality_residual
  std::vector<double> energy_trace;
  double solve_residual = 0.0;
  double max_pivot_ratio = 0.0;
  std::optional<double> nu_threshold;
};

struct EvoFields {
  WeightedSignal s;
  WeightedSignal w;
  WeightedSignal v;
};

struct EvoSolution {
  WeightedSignal s;
  WeightedSignal w;
  WeightedSignal v;
  SpatialGrid sgrid;
  Coefficients coeffs;
  std::optional<double> source_onset;
  Diagnostics diagnostics;

  EvoFields fields() const { return {s, w, v}; }
};

EvoSolution solve(const EvoProblem& p, unsigned threads = 0);

// Applies (d0 M(d0^{-1}) + A) to u spectrally, including the boundary nodes'
// physical v-rows. The result has the source channel layout.
WeightedSignal apply_operator(const SpatialGrid& sgrid, const Coefficients& coeffs, const EvoFields& u);

// lamhat a(e, 1/lamhat) s_e - v_e at both ends (channels 0: left, 1: right).
WeightedSignal boundary_defect(const SpatialGrid& sgrid, const ImpedanceLaw& imp, const EvoFields& u);

// |cutoff(U, a - dt)| / |U|. Throws Error(kMisuse) when the source of the
// solved problem has a nonzero sample before a.
double causality_residual(const EvoSolution& sol, double a);

// E(t_i) = 1/2 sum_x w_x (kappa0 |s|^2 + kappa1 |w|^2 + eps |v|^2).
std::vector<double> energy_trace(const EvoSolution& sol);

// Trapezoidal time stepping of the same semi-discrete system. Memory
// remainders and impedance remainders make the oracle unavailable.
EvoSolution time_step_oracle(const EvoProblem& p);

// Relative space-time distance |a - b| / |b| summed over the three fields.
double relative_difference(const EvoFields& a, const EvoFields& b, const SpatialGrid& sgrid);

}  // namespace evocalc
