#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evocalc/banded.hpp"
#include "evocalc/operator_function.hpp"
#include "evocalc/weighted_time.hpp"

namespace evocalc {

/// Nodes x_j = -1/2 + j/N, j = 0..N, on the interval ]-1/2, 1/2[.
class SpatialGrid {
 public:
  explicit SpatialGrid(std::size_t intervals);

  static SpatialGrid from_nodes(std::size_t nx) { return SpatialGrid(nx - 1); }

  std::size_t intervals() const noexcept { return n_; }
  std::size_t size() const noexcept { return n_ + 1; }
  double hx() const noexcept { return 1.0 / static_cast<double>(n_); }
  double node(std::size_t j) const noexcept;
  // Trapezoidal quadrature weight of node j (hx/2 at both ends).
  double weight(std::size_t j) const noexcept;

  bool operator==(const SpatialGrid&) const = default;

 private:
  std::size_t n_;
};

enum class Closure {
  // Second-order one-sided rows (-3, 4, -1)/(2h) at both ends; exact on quadratics.
  kSecondOrderOneSided,
  // (u1 - u0)/h at the ends; H D + D^T H = diag(-1, 0, ..., 0, 1) with H the trapezoid weights.
  kSummationByParts,
};

// First-derivative matrix; centred differences in the interior.
BandMatrix derivative_matrix(const SpatialGrid& grid, Closure closure = Closure::kSecondOrderOneSided);

// Applies a derivative matrix to one spatial slice.
std::vector<Complex> apply_derivative(const BandMatrix& d, std::span<const Complex> u);

/// Per-node coefficient fields of the block material law.
struct Coefficients {
  std::vector<double> kappa0;
  std::vector<double> kappa1;
  std::vector<double> eps;
  std::vector<Complex> eta;
  std::vector<Complex> mu0;
  std::vector<Complex> mu1;
  // Optional scalar memory kernel m(z) added to mu1 in the (v, v) remainder;
  // per node it is scaled by memory_weight.
  std::optional<OperatorFunction> memory;
  std::vector<Complex> memory_weight;

  static Coefficients constant(const SpatialGrid& grid, double kappa0, double kappa1, double eps, Complex eta,
                               Complex mu0, Complex mu1);

  std::size_t size() const noexcept { return kappa0.size(); }
  bool has_memory() const noexcept { return memory.has_value() && !memory->is_zero(); }

  // Shape, sign and finiteness checks; throws Error(kInvalidArgument).
  void validate(const SpatialGrid& grid) const;

  // min_j (nu eps_j + Re eta_j).
  double material_margin(double nu) const;

  // The (v, v) coefficient of the eliminated system at lamhat:
  //   eps lamhat + eta + (mu1 + m(1/lamhat) w + |mu0|^2 / kappa1) / lamhat.
  Complex vv_symbol(std::size_t j, Complex lamhat) const;
};

/// a(z) = a0 + a1 z + a2 z^2 + z^3 a3(z) at one endpoint, real coefficients.
struct EndpointImpedance {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  std::optional<OperatorFunction> remainder;

  Complex evaluate(Complex z) const;
  // a2 + z a3(z): the part of a beyond the first two coefficients, divided by z^2.
  Complex tail(Complex z) const;
  bool has_tail() const noexcept;
  bool is_zero() const noexcept;
};

struct ImpedanceLaw {
  EndpointImpedance left;   // x = -1/2
  EndpointImpedance right;  // x = +1/2

  static ImpedanceLaw zero() { return {}; }
  // Checks a(z*) = a(z)* on a few sample points; throws Error(kInvalidArgument).
  void validate() const;
};

/**
 * Piecewise-polynomial interior field a(x, z) = sum_p z^p c_p(x), with each
 * c_p(x) = sum_m b_{pm} x^m. Used only by the product-rule check.
 */
struct InteriorImpedanceField {
  std::vector<std::vector<double>> coefficients;  // [power][monomial]

  Complex evaluate(double x, Complex z) const;
  Complex evaluate_dx(double x, Complex z) const;
};

/**
 * Frequency-independent part of the eliminated (s, v) system. Unknowns are
 * interleaved as (s_0, v_0, s_1, v_1, ...).
 */
class SystemSkeleton {
 public:
  SystemSkeleton(SpatialGrid grid, Closure closure = Closure::kSummationByParts);

  const SpatialGrid& grid() const noexcept { return grid_; }
  const BandMatrix& derivative() const noexcept { return d_; }
  Closure closure() const noexcept { return closure_; }
  std::size_t unknowns() const noexcept { return 2 * grid_.size(); }

  static std::size_t s_index(std::size_t j) { return 2 * j; }
  static std::size_t v_index(std::size_t j) { return 2 * j + 1; }

  BandMatrix assemble(const Coefficients& coeffs, const ImpedanceLaw& imp, Complex lamhat) const;

  // Right-hand side after eliminating w: (f1, f3 - mu0 f2 / (lamhat kappa1)),
  // with zeros in the two impedance rows.
  std::vector<Complex> rhs(const Coefficients& coeffs, Complex lamhat, std::span<const Complex> f1,
                           std::span<const Complex> f2, std::span<const Complex> f3) const;

  // w = (f2 + conj(mu0) v) / (lamhat kappa1).
  std::vector<Complex> reconstruct_w(const Coefficients& coeffs, Complex lamhat, std::span<const Complex> f2,
                                     std::span<const Complex> v) const;

 private:
  SpatialGrid grid_;
  Closure closure_;
  BandMatrix d_;
  std::size_t half_band_;
};

BandMatrix assemble_frequency_system(const SpatialGrid& grid, const Coefficients& coeffs, const ImpedanceLaw& imp,
                                     Complex lamhat);

struct AdmissibilityReport {
  bool pass = false;
  bool sign_left = false;   // -a0(-1/2) >= 0
  bool sign_right = false;  // +a0(+1/2) >= 0
  double margin_left = 0.0;   // -nu a0(-1/2) - a1(-1/2)
  double margin_right = 0.0;  // +nu a0(+1/2) + a1(+1/2)
  bool dirichlet_left = false;   // a(-1/2, .) == 0: v = 0 there, passes with margin 0
  bool dirichlet_right = false;
  // C1 / nu with C1 the largest |a2 + z a3(z)| over the supplied frequencies.
  double remainder_deduction = 0.0;
  std::vector<std::string> violations;
};

// frequencies: optional sample of xi for the remainder deduction; when empty a
// logarithmic sweep of the spectral line is used.
AdmissibilityReport impedance_admissibility(const ImpedanceLaw& imp, double nu,
                                            std::span<const double> frequencies = {});

// Weighted space-time L2 norm: time weight e^{-2 nu t} dt, trapezoid in space.
double space_time_norm(const WeightedSignal& field, const SpatialGrid& grid);

// Residual of d(a s) = a' s + a ds in the space-time norm; s has one channel per node.
double product_rule_check(const InteriorImpedanceField& a, const WeightedSignal& s,
                          Closure closure = Closure::kSecondOrderOneSided);

/// Random element of D(A): s, w, v are space-time fields with one channel per node.
struct DomainFields {
  WeightedSignal s;
  WeightedSignal w;
  WeightedSignal v;
};

// Smooth-in-time, random-in-space fields whose boundary v samples satisfy the
// impedance rows exactly at every frequency.
DomainFields random_domain_element(const SpatialGrid& grid, const TimeGrid& tgrid, const ImpedanceLaw& imp,
                                   std::uint64_t seed, bool adjoint_domain = false);

// Re <chi_{t <= cut} U | A U>_{nu,0,0}; cut = +inf gives the plain pairing.
double accretivity_pairing(const SystemSkeleton& skeleton, const DomainFields& u, double cut);

struct AccretivityOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::vector<double> cut_times;
  double tol = 1e-8;  // pairings must stay >= -tol |U|^2
};

struct AccretivityReport {
  double min_plain = 0.0;       // min over trials of Re<U|AU>
  double min_cutoff = 0.0;      // min over trials and cut times
  double min_normalised = 0.0;  // min of pairing / |U|^2 over everything
  bool pass = false;
};

AccretivityReport accretivity_check(const SpatialGrid& grid, const Coefficients& coeffs, const ImpedanceLaw& imp,
                                    const TimeGrid& tgrid, const AccretivityOptions& options);

// |<AU, V> - <U, A*V>| relative to |AU||V| + |U||A*V| for U in D(A), V in D(A*).
double adjoint_identity_residual(const SpatialGrid& grid, const ImpedanceLaw& imp, const TimeGrid& tgrid,
                                 std::uint64_t seed);

}  // namespace evocalc
