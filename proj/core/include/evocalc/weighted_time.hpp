#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace evocalc {

using Complex = std::complex<double>;

/**
 * Uniform sampling of the window [t0, t0 + n*dt] together with the weight nu
 * of the space H_{nu,0}.
 *
 * Samples sit at cell centres, t_j = t0 + (j + 1/2) dt, and every signal is
 * identically zero outside the window. With that convention the trapezoidal
 * rule (zero-extended) reduces to dt * sum_j, which is what every quadrature
 * in this library uses.
 */
class TimeGrid {
 public:
  TimeGrid(double t0, double dt, std::size_t n, double nu);

  double t0() const noexcept { return t0_; }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return n_; }
  double nu() const noexcept { return nu_; }

  double length() const noexcept { return dt_ * static_cast<double>(n_); }
  double time(std::size_t j) const noexcept {
    return t0_ + (static_cast<double>(j) + 0.5) * dt_;
  }
  double t_end() const noexcept { return t0_ + length(); }

  // xi_k = 2 pi (k - n/2) / (n dt), k = 0..n-1.
  double frequency(std::size_t k) const noexcept;
  double frequency_step() const noexcept;

  // e^{-nu T}: the damping applied to periodic wrap-around.
  double aliasing_budget() const noexcept;
  bool satisfies_aliasing_bound(double eps_alias) const noexcept;

  TimeGrid with_nu(double nu) const { return TimeGrid(t0_, dt_, n_, nu); }

  bool operator==(const TimeGrid&) const = default;

 private:
  double t0_;
  double dt_;
  std::size_t n_;
  double nu_;
};

/// Time-sampled element of H_{nu,0}(R, C^d), stored time-major.
class WeightedSignal {
 public:
  WeightedSignal(TimeGrid grid, std::size_t channels);
  WeightedSignal(TimeGrid grid, std::size_t channels, std::vector<Complex> samples);

  static WeightedSignal zeros(const TimeGrid& grid, std::size_t channels) {
    return WeightedSignal(grid, channels);
  }
  static WeightedSignal from_function(const TimeGrid& grid, std::size_t channels,
                                      const std::function<Complex(double t, std::size_t c)>& fn);
  static WeightedSignal from_scalar(const TimeGrid& grid, const std::function<Complex(double t)>& fn);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return grid_.size(); }

  Complex operator()(std::size_t j, std::size_t c) const { return samples_[j * channels_ + c]; }
  Complex& operator()(std::size_t j, std::size_t c) { return samples_[j * channels_ + c]; }

  std::span<const Complex> slice(std::size_t j) const {
    return {samples_.data() + j * channels_, channels_};
  }
  std::span<Complex> slice(std::size_t j) { return {samples_.data() + j * channels_, channels_}; }

  const std::vector<Complex>& samples() const noexcept { return samples_; }
  std::vector<Complex>& samples() noexcept { return samples_; }

  bool is_zero() const noexcept;
  double max_abs() const noexcept;

  // Same samples viewed under a different weight; the grid geometry is kept.
  WeightedSignal reweighted(double nu) const;

  WeightedSignal& operator+=(const WeightedSignal& other);
  WeightedSignal& operator-=(const WeightedSignal& other);
  WeightedSignal& operator*=(Complex alpha);

 private:
  TimeGrid grid_;
  std::size_t channels_;
  std::vector<Complex> samples_;
};

WeightedSignal operator+(WeightedSignal a, const WeightedSignal& b);
WeightedSignal operator-(WeightedSignal a, const WeightedSignal& b);
WeightedSignal operator*(Complex alpha, WeightedSignal a);

// <f, g>_{nu,0}: conjugate-linear in f.
Complex inner_product(const WeightedSignal& f, const WeightedSignal& g);

// |d0^k f|_{nu,0} for k in {-2..2}.
double weighted_norm(const WeightedSignal& f, int k = 0);

// Zeroes every sample with t > a.
WeightedSignal cutoff(const WeightedSignal& f, double a);

// (tau_h f)(t) = f(t + h); h must be a whole number of steps.
WeightedSignal translate(const WeightedSignal& f, double h);

void require_same_layout(const WeightedSignal& f, const WeightedSignal& g, const char* module);

}  // namespace evocalc
