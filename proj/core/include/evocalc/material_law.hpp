#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "evocalc/operator_function.hpp"

namespace evocalc {

/// M(z) = M0 + z M1 + z^2 remainder(z), with M0 Hermitian positive semidefinite.
class MaterialLaw {
 public:
  MaterialLaw(Matrix m0, Matrix m1, OperatorFunction remainder);
  MaterialLaw(Matrix m0, Matrix m1);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m0_.rows()); }
  const Matrix& m0() const noexcept { return m0_; }
  const Matrix& m1() const noexcept { return m1_; }
  const OperatorFunction& remainder() const noexcept { return remainder_; }

  // The whole law as a single descriptor (for apply_function).
  OperatorFunction as_function() const;

 private:
  Matrix m0_;
  Matrix m1_;
  OperatorFunction remainder_;
};

Matrix evaluate(const MaterialLaw& law, std::complex<double> z);
Matrix evaluate(const OperatorFunction& fn, std::complex<double> z);

// Smallest eigenvalue of nu M0 + (M1 + M1^*)/2.
double wellposedness_margin(const MaterialLaw& law, double nu);

/**
 * Smallest nu in [nu_lo, nu_hi] whose margin reaches c0, by bisection to
 * tol. Margins are nondecreasing in nu because M0 >= 0. Returns nullopt when
 * even nu_hi falls short.
 */
std::optional<double> nu_threshold(const MaterialLaw& law, double c0, double nu_lo = 1e-6,
                                   double nu_hi = 1e6, double tol = 1e-6);

// exp(h/z) times the identity.
OperatorFunction delay_function(double h, std::size_t dim);

struct ConservativityReport {
  bool conservative = false;
  bool remainder_zero = false;
  bool m0_positive = false;
  bool m1_skew = false;
  double m0_min_eigenvalue = 0.0;
  double m1_hermitian_part_norm = 0.0;
  std::vector<std::string> failures;
};

ConservativityReport is_conservative(const MaterialLaw& law, double eig_tol = 1e-10, double skew_tol = 1e-12);

// The 3x3 law of the (s, w, v) system at one node:
//   M0 = diag(kappa0, kappa1, eps),
//   M1 = [[0,0,0],[0,0,-conj(mu0)],[0,mu0,eta]],
//   remainder(z) = diag(0, 0, mu1 + vv_memory(z)).
MaterialLaw block_material_law(double kappa0, double kappa1, double eps, std::complex<double> eta,
                               std::complex<double> mu0, std::complex<double> mu1,
                               const OperatorFunction* vv_memory = nullptr);

double min_hermitian_eigenvalue(const Matrix& m);

}  // namespace evocalc
