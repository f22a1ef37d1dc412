#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace evocalc {

/**
 * Square complex band matrix with kl sub- and ku super-diagonals.
 *
 * Storage follows the LAPACK gbtrf layout with kl extra rows on top for
 * pivoting fill-in: entry (i, j) lives at row kl + ku + i - j of column j.
 */
class BandMatrix {
 public:
  using value_type = std::complex<double>;

  BandMatrix(std::size_t n, std::size_t kl, std::size_t ku);

  std::size_t size() const noexcept { return n_; }
  std::size_t lower() const noexcept { return kl_; }
  std::size_t upper() const noexcept { return ku_; }

  bool in_band(std::size_t i, std::size_t j) const noexcept {
    return j + kl_ >= i && i + ku_ >= j;
  }
  value_type operator()(std::size_t i, std::size_t j) const;
  // Writes outside the band are a programming error and throw.
  value_type& at(std::size_t i, std::size_t j);
  void add(std::size_t i, std::size_t j, value_type v) { at(i, j) += v; }

  // Zero every entry of row i.
  void clear_row(std::size_t i);

  std::vector<value_type> multiply(std::span<const value_type> x) const;
  Eigen::MatrixXcd to_dense() const;

 private:
  friend class BandLU;
  std::size_t ldab() const noexcept { return 2 * kl_ + ku_ + 1; }
  value_type& raw(std::size_t row, std::size_t col) { return ab_[col * ldab() + row]; }
  value_type raw(std::size_t row, std::size_t col) const { return ab_[col * ldab() + row]; }

  std::size_t n_, kl_, ku_;
  std::vector<value_type> ab_;
};

/// LU factorisation with partial pivoting of a BandMatrix.
class BandLU {
 public:
  explicit BandLU(BandMatrix a);

  bool singular() const noexcept { return singular_; }
  // max |u_ii| / min |u_ii|; a cheap growth-and-conditioning indicator.
  double pivot_ratio() const noexcept { return pivot_ratio_; }

  std::vector<std::complex<double>> solve(std::span<const std::complex<double>> b) const;

 private:
  BandMatrix lu_;
  std::vector<std::size_t> pivots_;
  bool singular_ = false;
  double pivot_ratio_ = 0.0;
};

double relative_residual(const BandMatrix& a, std::span<const std::complex<double>> x,
                         std::span<const std::complex<double>> b);

}  // namespace evocalc
