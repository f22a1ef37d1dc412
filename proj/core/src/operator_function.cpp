#include "evocalc/operator_function.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evocalc/error.hpp"

namespace evocalc {
namespace {

constexpr const char* kModule = "material_law";

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

OperatorFunction::OperatorFunction(std::size_t dim, Kind kind, double radius)
    : dim_(dim), kind_(std::move(kind)), radius_(radius) {
  if (!(radius > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "analyticity radius must be positive");
  }
}

OperatorFunction OperatorFunction::polynomial(std::size_t dim, std::vector<Term> terms, double radius) {
  for (const auto& t : terms) {
    if (t.power < 0) throw Error(ErrorKind::kInvalidArgument, kModule, "polynomial powers must be >= 0");
    if (static_cast<std::size_t>(t.coefficient.rows()) != dim ||
        static_cast<std::size_t>(t.coefficient.cols()) != dim) {
      throw Error(ErrorKind::kInvalidArgument, kModule, "polynomial coefficient has wrong shape");
    }
    if (!all_finite(t.coefficient)) {
      throw Error(ErrorKind::kInvalidArgument, kModule, "polynomial coefficient is not finite");
    }
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.power < b.power; });
  return OperatorFunction(dim, Polynomial{std::move(terms)}, radius);
}

OperatorFunction OperatorFunction::constant(const Matrix& value) {
  const auto dim = static_cast<std::size_t>(value.rows());
  return polynomial(dim, {Term{0, value}});
}

OperatorFunction OperatorFunction::zero(std::size_t dim) { return polynomial(dim, {}); }

OperatorFunction OperatorFunction::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return constant(Matrix::Identity(n, n));
}

OperatorFunction OperatorFunction::delay(double h, const Matrix& coefficient, bool allow_noncausal, double radius) {
  if (h > 0.0 && !allow_noncausal) {
    throw Error(ErrorKind::kInvalidArgument, kModule,
                "delay with h = " + std::to_string(h) + " > 0 is anticausal; flag it explicitly");
  }
  if (coefficient.rows() != coefficient.cols()) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "delay coefficient must be square");
  }
  return OperatorFunction(static_cast<std::size_t>(coefficient.rows()), Delay{h, coefficient, allow_noncausal},
                          radius);
}

OperatorFunction OperatorFunction::sum(std::vector<OperatorFunction> parts) {
  if (parts.empty()) throw Error(ErrorKind::kInvalidArgument, kModule, "empty sum has no dimension");
  const std::size_t dim = parts.front().dim();
  double radius = std::numeric_limits<double>::infinity();
  for (const auto& p : parts) {
    if (p.dim() != dim) throw Error(ErrorKind::kInvalidArgument, kModule, "sum parts differ in dimension");
    radius = std::min(radius, p.radius());
  }
  return OperatorFunction(dim, Sum{std::move(parts)}, radius);
}

OperatorFunction OperatorFunction::scalar_polynomial(std::vector<std::complex<double>> coefficients) {
  std::vector<Term> terms;
  for (std::size_t j = 0; j < coefficients.size(); ++j) {
    Matrix c(1, 1);
    c(0, 0) = coefficients[j];
    terms.push_back({static_cast<int>(j), c});
  }
  return polynomial(1, std::move(terms));
}

OperatorFunction OperatorFunction::scalar_delay(double h, std::complex<double> coefficient) {
  Matrix c(1, 1);
  c(0, 0) = coefficient;
  return delay(h, c);
}

bool OperatorFunction::in_region(std::complex<double> z) const noexcept {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  const bool needs_right_half = !is_polynomial();
  if (std::isinf(radius_)) return !needs_right_half || z.real() > 0.0;
  // Points 1/(i xi + nu) sit strictly inside B(r, r) when nu > 1/(2r); allow
  // a rounding margin on the circle itself.
  return std::abs(z - radius_) <= radius_ * (1.0 + 1e-12) && (!needs_right_half || z.real() > 0.0);
}

Matrix horner(const std::vector<OperatorFunction::Term>& terms, std::size_t dim, std::complex<double> z) {
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix acc = Matrix::Zero(n, n);
  if (terms.empty()) return acc;
  // terms are sorted by power; walk from the top, multiplying by z per gap.
  int power = terms.back().power;
  auto it = terms.rbegin();
  while (power >= 0) {
    acc *= z;
    while (it != terms.rend() && it->power == power) {
      acc += it->coefficient;
      ++it;
    }
    --power;
  }
  return acc;
}

Matrix OperatorFunction::evaluate(std::complex<double> z) const {
  if (!in_region(z)) {
    throw Error(ErrorKind::kDomain, kModule,
                "z = (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) +
                    ") outside the analyticity region");
  }
  return std::visit(
      [&](const auto& k) -> Matrix {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Polynomial>) {
          return horner(k.terms, dim_, z);
        } else if constexpr (std::is_same_v<K, Delay>) {
          return std::exp(k.h / z) * k.coefficient;
        } else {
          const auto n = static_cast<Eigen::Index>(dim_);
          Matrix acc = Matrix::Zero(n, n);
          for (const auto& p : k.parts) acc += p.evaluate(z);
          return acc;
        }
      },
      kind_);
}

std::complex<double> OperatorFunction::evaluate_scalar(std::complex<double> z) const {
  if (dim_ != 1) throw Error(ErrorKind::kInvalidArgument, kModule, "scalar evaluation of a matrix function");
  return evaluate(z)(0, 0);
}

bool OperatorFunction::is_zero() const noexcept {
  return std::visit(
      [](const auto& k) -> bool {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Polynomial>) {
          return std::all_of(k.terms.begin(), k.terms.end(), [](const Term& t) { return t.coefficient.isZero(0.0); });
        } else if constexpr (std::is_same_v<K, Delay>) {
          return k.coefficient.isZero(0.0);
        } else {
          return std::all_of(k.parts.begin(), k.parts.end(), [](const OperatorFunction& p) { return p.is_zero(); });
        }
      },
      kind_);
}

bool OperatorFunction::is_polynomial() const noexcept {
  return std::visit(
      [](const auto& k) -> bool {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Polynomial>) {
          return true;
        } else if constexpr (std::is_same_v<K, Delay>) {
          return k.coefficient.isZero(0.0);
        } else {
          return std::all_of(k.parts.begin(), k.parts.end(),
                             [](const OperatorFunction& p) { return p.is_polynomial(); });
        }
      },
      kind_);
}

bool OperatorFunction::is_causal() const noexcept {
  return std::visit(
      [](const auto& k) -> bool {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Polynomial>) {
          return true;
        } else if constexpr (std::is_same_v<K, Delay>) {
          return k.h <= 0.0 || k.coefficient.isZero(0.0);
        } else {
          return std::all_of(k.parts.begin(), k.parts.end(), [](const OperatorFunction& p) { return p.is_causal(); });
        }
      },
      kind_);
}

Matrix OperatorFunction::coefficient(int power) const {
  if (!is_polynomial()) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "coefficients exist only for polynomial descriptors");
  }
  const auto n = static_cast<Eigen::Index>(dim_);
  Matrix acc = Matrix::Zero(n, n);
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Polynomial>) {
          for (const auto& t : k.terms)
            if (t.power == power) acc += t.coefficient;
        } else if constexpr (std::is_same_v<K, Sum>) {
          for (const auto& p : k.parts) acc += p.coefficient(power);
        }
      },
      kind_);
  return acc;
}

int OperatorFunction::degree() const {
  if (!is_polynomial()) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "degree exists only for polynomial descriptors");
  }
  int deg = -1;
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Polynomial>) {
          for (const auto& t : k.terms)
            if (!t.coefficient.isZero(0.0)) deg = std::max(deg, t.power);
        } else if constexpr (std::is_same_v<K, Sum>) {
          for (const auto& p : k.parts) deg = std::max(deg, p.degree());
        }
      },
      kind_);
  return deg;
}

}  // namespace evocalc
