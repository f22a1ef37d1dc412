#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

namespace evocalc {

using Matrix = Eigen::MatrixXcd;

/**
 * Symbolic analytic matrix-valued function z -> M(z) on the ball B(r, r).
 *
 * Three kinds are supported: polynomials sum_j z^j C_j, delays exp(h/z) C
 * (which realise tau_h = exp(h d0) under the calculus), and finite sums.
 * An infinite radius means the region is the open right half plane for
 * delays and all of C for polynomials.
 */
class OperatorFunction {
 public:
  struct Term {
    int power;
    Matrix coefficient;
  };
  struct Polynomial {
    std::vector<Term> terms;
  };
  struct Delay {
    double h;
    Matrix coefficient;
    bool allow_noncausal = false;
  };
  struct Sum {
    std::vector<OperatorFunction> parts;
  };

  static OperatorFunction polynomial(std::size_t dim, std::vector<Term> terms,
                                     double radius = std::numeric_limits<double>::infinity());
  static OperatorFunction constant(const Matrix& value);
  static OperatorFunction zero(std::size_t dim);
  static OperatorFunction identity(std::size_t dim);
  // exp(h/z) * coefficient. h > 0 is rejected unless allow_noncausal is set.
  static OperatorFunction delay(double h, const Matrix& coefficient, bool allow_noncausal = false,
                                double radius = std::numeric_limits<double>::infinity());
  static OperatorFunction sum(std::vector<OperatorFunction> parts);

  // Scalar conveniences (dim 1).
  static OperatorFunction scalar_polynomial(std::vector<std::complex<double>> coefficients);
  static OperatorFunction scalar_delay(double h, std::complex<double> coefficient = 1.0);

  std::size_t dim() const noexcept { return dim_; }
  double radius() const noexcept { return radius_; }

  bool in_region(std::complex<double> z) const noexcept;
  // Throws Error(kDomain) outside the region.
  Matrix evaluate(std::complex<double> z) const;
  std::complex<double> evaluate_scalar(std::complex<double> z) const;

  bool is_zero() const noexcept;
  bool is_polynomial() const noexcept;
  // True when every delay in the descriptor has h <= 0.
  bool is_causal() const noexcept;

  // Highest power with a nonzero coefficient, only for polynomial descriptors.
  int degree() const;
  // Coefficient of z^j for polynomial descriptors (zero matrix if absent).
  Matrix coefficient(int power) const;

  const auto& kind() const noexcept { return kind_; }

 private:
  using Kind = std::variant<Polynomial, Delay, Sum>;
  OperatorFunction(std::size_t dim, Kind kind, double radius);

  std::size_t dim_;
  Kind kind_;
  double radius_;
};

// Matrix-valued Horner evaluation of sum_j z^j C_j, used by the polynomial path.
Matrix horner(const std::vector<OperatorFunction::Term>& terms, std::size_t dim, std::complex<double> z);

}  // namespace evocalc
