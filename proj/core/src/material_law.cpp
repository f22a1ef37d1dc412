#include "evocalc/material_law.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "evocalc/error.hpp"

namespace evocalc {
namespace {

constexpr const char* kModule = "material_law";

OperatorFunction square_shift(const OperatorFunction& remainder) {
  // z^2 * remainder(z) as a descriptor: only polynomial remainders can be
  // shifted symbolically; others are wrapped by evaluation in MaterialLaw.
  const auto dim = remainder.dim();
  std::vector<OperatorFunction::Term> terms;
  for (int p = 0; p <= remainder.degree(); ++p) {
    Matrix c = remainder.coefficient(p);
    if (!c.isZero(0.0)) terms.push_back({p + 2, std::move(c)});
  }
  return OperatorFunction::polynomial(dim, std::move(terms), remainder.radius());
}

}  // namespace

MaterialLaw::MaterialLaw(Matrix m0, Matrix m1, OperatorFunction remainder)
    : m0_(std::move(m0)), m1_(std::move(m1)), remainder_(std::move(remainder)) {
  const auto d = m0_.rows();
  if (m0_.cols() != d || m1_.rows() != d || m1_.cols() != d ||
      remainder_.dim() != static_cast<std::size_t>(d)) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "material law blocks differ in shape");
  }
  if ((m0_ - m0_.adjoint()).norm() > 1e-12 * std::max(1.0, m0_.norm())) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "M0 must be Hermitian");
  }
  const double lo = min_hermitian_eigenvalue(m0_);
  if (lo < -1e-12) {
    std::ostringstream msg;
    msg << "M0 must be positive semidefinite (smallest eigenvalue " << lo << ")";
    throw Error(ErrorKind::kInvalidArgument, kModule, msg.str());
  }
}

MaterialLaw::MaterialLaw(Matrix m0, Matrix m1)
    : MaterialLaw(m0, std::move(m1), OperatorFunction::zero(static_cast<std::size_t>(m0.rows()))) {}

OperatorFunction MaterialLaw::as_function() const {
  const auto d = dim();
  std::vector<OperatorFunction> parts;
  parts.push_back(OperatorFunction::polynomial(d, {{0, m0_}, {1, m1_}}));
  if (!remainder_.is_zero()) {
    if (remainder_.is_polynomial()) {
      parts.push_back(square_shift(remainder_));
    } else {
      throw Error(ErrorKind::kInvalidArgument, kModule,
                  "only polynomial remainders can be flattened into one descriptor; apply the remainder "
                  "separately");
    }
  }
  return parts.size() == 1 ? parts.front() : OperatorFunction::sum(std::move(parts));
}

Matrix evaluate(const OperatorFunction& fn, std::complex<double> z) { return fn.evaluate(z); }

Matrix evaluate(const MaterialLaw& law, std::complex<double> z) {
  Matrix out = law.m0() + z * law.m1();
  if (!law.remainder().is_zero()) out += (z * z) * law.remainder().evaluate(z);
  return out;
}

double min_hermitian_eigenvalue(const Matrix& m) {
  const Matrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double wellposedness_margin(const MaterialLaw& law, double nu) {
  if (!(nu > 0.0)) throw Error(ErrorKind::kInvalidArgument, kModule, "margin requires nu > 0");
  return min_hermitian_eigenvalue(nu * law.m0() + 0.5 * (law.m1() + law.m1().adjoint()));
}

std::optional<double> nu_threshold(const MaterialLaw& law, double c0, double nu_lo, double nu_hi, double tol) {
  if (wellposedness_margin(law, nu_hi) < c0) return std::nullopt;
  if (wellposedness_margin(law, nu_lo) >= c0) return nu_lo;
  while (nu_hi - nu_lo > tol) {
    const double mid = 0.5 * (nu_lo + nu_hi);
    if (wellposedness_margin(law, mid) >= c0) {
      nu_hi = mid;
    } else {
      nu_lo = mid;
    }
  }
  return nu_hi;
}

OperatorFunction delay_function(double h, std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return OperatorFunction::delay(h, Matrix::Identity(n, n), /*allow_noncausal=*/h > 0.0);
}

ConservativityReport is_conservative(const MaterialLaw& law, double eig_tol, double skew_tol) {
  ConservativityReport report;
  report.remainder_zero = law.remainder().is_zero();
  report.m0_min_eigenvalue = min_hermitian_eigenvalue(law.m0());
  report.m0_positive = report.m0_min_eigenvalue > eig_tol;
  report.m1_hermitian_part_norm = (law.m1() + law.m1().adjoint()).norm();
  report.m1_skew = report.m1_hermitian_part_norm <= skew_tol;
  if (!report.remainder_zero) report.failures.emplace_back("remainder M2 is not identically zero");
  if (!report.m0_positive) report.failures.emplace_back("M0 is not strictly positive");
  if (!report.m1_skew) report.failures.emplace_back("M1 is not skew-Hermitian");
  report.conservative = report.failures.empty();
  return report;
}

MaterialLaw block_material_law(double kappa0, double kappa1, double eps, std::complex<double> eta,
                               std::complex<double> mu0, std::complex<double> mu1,
                               const OperatorFunction* vv_memory) {
  Matrix m0 = Matrix::Zero(3, 3);
  m0(0, 0) = kappa0;
  m0(1, 1) = kappa1;
  m0(2, 2) = eps;
  Matrix m1 = Matrix::Zero(3, 3);
  m1(1, 2) = -std::conj(mu0);
  m1(2, 1) = mu0;
  m1(2, 2) = eta;
  Matrix r = Matrix::Zero(3, 3);
  r(2, 2) = mu1;
  OperatorFunction remainder = OperatorFunction::constant(r);
  if (vv_memory != nullptr && !vv_memory->is_zero()) {
    if (vv_memory->dim() != 1) {
      throw Error(ErrorKind::kInvalidArgument, kModule, "memory term must be scalar");
    }
    // Embed the scalar memory into the (v, v) slot by wrapping its kind.
    const auto& kind = vv_memory->kind();
    Matrix slot = Matrix::Zero(3, 3);
    slot(2, 2) = 1.0;
    if (const auto* d = std::get_if<OperatorFunction::Delay>(&kind)) {
      Matrix c = d->coefficient(0, 0) * slot;
      remainder = OperatorFunction::sum(
          {remainder, OperatorFunction::delay(d->h, c, d->allow_noncausal, vv_memory->radius())});
    } else if (vv_memory->is_polynomial()) {
      std::vector<OperatorFunction::Term> terms;
      for (int p = 0; p <= vv_memory->degree(); ++p) terms.push_back({p, vv_memory->coefficient(p)(0, 0) * slot});
      remainder = OperatorFunction::sum({remainder, OperatorFunction::polynomial(3, std::move(terms))});
    } else {
      throw Error(ErrorKind::kInvalidArgument, kModule, "memory term must be a delay or a polynomial");
    }
  }
  return MaterialLaw(std::move(m0), std::move(m1), std::move(remainder));
}

}  // namespace evocalc
