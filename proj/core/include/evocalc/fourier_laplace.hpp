#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "evocalc/weighted_time.hpp"

namespace evocalc {

class OperatorFunction;

/**
 * Image of a WeightedSignal under the Fourier-Laplace transform L_nu.
 *
 * values(k, c) approximates (L_nu f_c)(xi_k) with the continuum normalisation
 * (1/sqrt(2 pi)) int e^{-i xi t} e^{-nu t} f(t) dt, so the spectral inner
 * product sum_k conj(F_k) G_k dxi reproduces the weighted time inner product
 * exactly.
 */
class SpectralSignal {
 public:
  SpectralSignal(TimeGrid grid, std::size_t channels);
  SpectralSignal(TimeGrid grid, std::size_t channels, std::vector<Complex> values);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return grid_.size(); }

  double frequency(std::size_t k) const noexcept { return grid_.frequency(k); }
  // i xi_k + nu, the symbol of d0 at bin k.
  Complex symbol(std::size_t k) const noexcept { return {grid_.nu(), grid_.frequency(k)}; }

  Complex operator()(std::size_t k, std::size_t c) const { return values_[k * channels_ + c]; }
  Complex& operator()(std::size_t k, std::size_t c) { return values_[k * channels_ + c]; }

  std::span<const Complex> slice(std::size_t k) const {
    return {values_.data() + k * channels_, channels_};
  }
  std::span<Complex> slice(std::size_t k) { return {values_.data() + k * channels_, channels_}; }

  const std::vector<Complex>& values() const noexcept { return values_; }
  std::vector<Complex>& values() noexcept { return values_; }

 private:
  TimeGrid grid_;
  std::size_t channels_;
  std::vector<Complex> values_;
};

SpectralSignal forward(const WeightedSignal& f);
WeightedSignal inverse(const SpectralSignal& F);

Complex spectral_inner_product(const SpectralSignal& F, const SpectralSignal& G);

// L_nu^* (i xi + nu)^k L_nu f for k in {-2..2}.
WeightedSignal apply_d0(const WeightedSignal& f, int k);

// Cumulative trapezoidal integral from the window start (f = 0 before it).
WeightedSignal antiderivative_oracle(const WeightedSignal& f);

// M(d0^{-1}) f = L_nu^* M(1/(i m + nu)) L_nu f.
WeightedSignal apply_function(const OperatorFunction& M, const WeightedSignal& f,
                              unsigned threads = 1);

// Per-frequency map on the spectral slices. The callback receives the bin, the
// symbol lamhat = i xi_k + nu, the input slice and the output slice.
using SpectralKernel =
    std::function<void(std::size_t k, Complex lamhat, std::span<const Complex> in, std::span<Complex> out)>;

WeightedSignal apply_spectral(const WeightedSignal& f, std::size_t out_channels, const SpectralKernel& kernel,
                              unsigned threads = 1);

}  // namespace evocalc
