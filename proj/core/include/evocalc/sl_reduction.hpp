#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "evocalc/evo_solver.hpp"

namespace evocalc {

/**
 * Scalar problem in y = d0^{-1} v:
 *   (r lambda + eta lamhat + q) y - d(p d y) = f,   lambda = lamhat^2,
 *   a(e, 1/lamhat) p(e) y'(e) + y(e) = 0 at both ends.
 */
struct ScalarSLProblem {
  TimeGrid tgrid;
  SpatialGrid sgrid;
  std::vector<double> r;
  std::vector<Complex> q;  // |mu0|^2 / kappa1 + mu1
  std::vector<double> p;   // 1 / kappa0
  std::vector<Complex> eta;
  ImpedanceLaw imp;
  WeightedSignal f;  // one channel per node
  // Kept for the reconstruction s = -p D y, w = mu0* y / kappa1.
  std::vector<double> kappa1;
  std::vector<Complex> mu0;
  // Optional memory kernel entering q as m(1/lamhat) * weight.
  std::optional<OperatorFunction> memory;
  std::vector<Complex> memory_weight;
  // eps == 0 everywhere: operator eta lamhat + q - d p d.
  bool parabolic = false;

  double nu() const noexcept { return tgrid.nu(); }
  Complex q_at(std::size_t j, Complex lamhat) const;
};

ScalarSLProblem reduce(const EvoProblem& p);

enum class ScalarMode {
  // Flux form with harmonic averages of p at half nodes; tridiagonal.
  kConservative,
  // D p D with the system's derivative matrix; reproduces the full solver.
  kComposed,
};

// Per-frequency matrix of the scalar problem.
BandMatrix scalar_matrix(const ScalarSLProblem& sp, Complex lamhat, ScalarMode mode);
// Right-hand side matching scalar_matrix for the spectral source slice f.
std::vector<Complex> scalar_rhs(const ScalarSLProblem& sp, std::span<const Complex> f, ScalarMode mode);

// a(e, 1/lamhat) at (left, right).
std::pair<Complex, Complex> robin_coefficients(const ScalarSLProblem& sp, Complex lamhat);

struct ScalarSolution {
  WeightedSignal y;
  WeightedSignal s;
  WeightedSignal w;
  WeightedSignal v;
  double solve_residual = 0.0;

  EvoFields fields() const { return {s, w, v}; }
};

ScalarSolution solve_scalar(const ScalarSLProblem& sp, ScalarMode mode = ScalarMode::kConservative,
                            unsigned threads = 0);

struct CompareReport {
  double diff_s = 0.0;
  double diff_w = 0.0;
  double diff_v = 0.0;
  double max_diff = 0.0;
  double full_residual = 0.0;
  double scalar_residual = 0.0;
};

CompareReport compare_with_full(const EvoProblem& p, unsigned threads = 0);

}  // namespace evocalc
