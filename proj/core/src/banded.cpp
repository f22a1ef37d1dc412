#include "evocalc/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "evocalc/error.hpp"

namespace evocalc {
namespace {

constexpr const char* kModule = "banded";

}  // namespace

BandMatrix::BandMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), ab_(n * (2 * kl + ku + 1)) {
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, kModule, "empty band matrix");
}

BandMatrix::value_type BandMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_ || !in_band(i, j)) return {};
  return raw(kl_ + ku_ + i - j, j);
}

BandMatrix::value_type& BandMatrix::at(std::size_t i, std::size_t j) {
  if (i >= n_ || j >= n_ || !in_band(i, j)) {
    throw Error(ErrorKind::kInvalidArgument, kModule,
                "entry (" + std::to_string(i) + ", " + std::to_string(j) + ") outside the band");
  }
  return raw(kl_ + ku_ + i - j, j);
}

void BandMatrix::clear_row(std::size_t i) {
  const std::size_t lo = i >= kl_ ? i - kl_ : 0;
  const std::size_t hi = std::min(n_ - 1, i + ku_);
  for (std::size_t j = lo; j <= hi; ++j) raw(kl_ + ku_ + i - j, j) = {};
}

std::vector<BandMatrix::value_type> BandMatrix::multiply(std::span<const value_type> x) const {
  std::vector<value_type> y(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t lo = j >= ku_ ? j - ku_ : 0;
    const std::size_t hi = std::min(n_ - 1, j + kl_);
    for (std::size_t i = lo; i <= hi; ++i) y[i] += raw(kl_ + ku_ + i - j, j) * x[j];
  }
  return y;
}

Eigen::MatrixXcd BandMatrix::to_dense() const {
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (in_band(i, j)) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*this)(i, j);
  return m;
}

BandLU::BandLU(BandMatrix a) : lu_(std::move(a)), pivots_(lu_.size()) {
  const std::size_t n = lu_.n_;
  const std::size_t kl = lu_.kl_;
  const std::size_t kv = lu_.ku_ + kl;
  std::size_t ju = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t km = std::min(kl, n - 1 - j);
    std::size_t jp = 0;
    double best = -1.0;
    for (std::size_t r = 0; r <= km; ++r) {
      const double mag = std::abs(lu_.raw(kv + r, j));
      if (mag > best) {
        best = mag;
        jp = r;
      }
    }
    pivots_[j] = j + jp;
    if (best == 0.0) {
      singular_ = true;
      continue;
    }
    ju = std::max(ju, std::min(j + lu_.ku_ + jp, n - 1));
    if (jp != 0) {
      for (std::size_t c = j; c <= ju; ++c) std::swap(lu_.raw(kv + j - c, c), lu_.raw(kv + j + jp - c, c));
    }
    if (km > 0) {
      const auto inv = 1.0 / lu_.raw(kv, j);
      for (std::size_t r = 1; r <= km; ++r) lu_.raw(kv + r, j) *= inv;
      for (std::size_t c = j + 1; c <= ju; ++c) {
        const auto ujc = lu_.raw(kv + j - c, c);
        if (ujc == std::complex<double>{}) continue;
        for (std::size_t r = 1; r <= km; ++r) lu_.raw(kv + j + r - c, c) -= lu_.raw(kv + r, j) * ujc;
      }
    }
  }
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const double d = std::abs(lu_.raw(kv, j));
    hi = std::max(hi, d);
    lo = std::min(lo, d);
  }
  if (lo == 0.0) singular_ = true;
  pivot_ratio_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

std::vector<std::complex<double>> BandLU::solve(std::span<const std::complex<double>> b) const {
  if (singular_) throw Error(ErrorKind::kSingularSystem, kModule, "solve with a singular factorisation");
  const std::size_t n = lu_.n_;
  if (b.size() != n) throw Error(ErrorKind::kInvalidArgument, kModule, "right-hand side has wrong length");
  const std::size_t kl = lu_.kl_;
  const std::size_t kv = lu_.ku_ + kl;
  std::vector<std::complex<double>> x(b.begin(), b.end());
  for (std::size_t j = 0; j < n; ++j) {
    if (pivots_[j] != j) std::swap(x[j], x[pivots_[j]]);
    const std::size_t km = std::min(kl, n - 1 - j);
    for (std::size_t r = 1; r <= km; ++r) x[j + r] -= lu_.raw(kv + r, j) * x[j];
  }
  for (std::size_t jj = n; jj-- > 0;) {
    x[jj] /= lu_.raw(kv, jj);
    const auto xj = x[jj];
    const std::size_t lo = jj >= kv ? jj - kv : 0;
    for (std::size_t i = lo; i < jj; ++i) x[i] -= lu_.raw(kv + i - jj, jj) * xj;
  }
  return x;
}

double relative_residual(const BandMatrix& a, std::span<const std::complex<double>> x,
                         std::span<const std::complex<double>> b) {
  const auto ax = a.multiply(x);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    num += std::norm(ax[i] - b[i]);
    den += std::norm(b[i]);
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

}  // namespace evocalc
