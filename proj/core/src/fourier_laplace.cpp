#include "evocalc/fourier_laplace.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "evocalc/error.hpp"
#include "evocalc/operator_function.hpp"
#include "evocalc/parallel.hpp"

namespace evocalc {
namespace {

constexpr const char* kModule = "fourier_laplace";

// FFTW planning is not thread-safe; execution with fftw_execute_dft is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t n, std::size_t channels, int sign) {
    std::lock_guard lock(mutex_);
    const Key key{n, channels, sign};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(n * channels);
    auto* out = fftw_alloc_complex(n * channels);
    const int len = static_cast<int>(n);
    const int stride = static_cast<int>(channels);
    fftw_plan plan = fftw_plan_many_dft(1, &len, stride, in, nullptr, stride, 1, out, nullptr, stride, 1, sign,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  struct Key {
    std::size_t n;
    std::size_t channels;
    int sign;
    auto operator<=>(const Key&) const = default;
  };

  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

void execute(std::vector<Complex>& in, std::vector<Complex>& out, std::size_t n, std::size_t channels,
             int sign) {
  fftw_plan plan = PlanCache::instance().get(n, channels, sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

// e^{2 pi i m j / n} with m = n/2, reduced mod n before the trig call.
Complex centring_twiddle(std::size_t j, std::size_t n) {
  const std::size_t m = n / 2;
  const std::size_t r = (m * j) % n;
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
  return std::polar(1.0, angle);
}

}  // namespace

SpectralSignal::SpectralSignal(TimeGrid grid, std::size_t channels)
    : grid_(grid), channels_(channels), values_(grid.size() * channels) {}

SpectralSignal::SpectralSignal(TimeGrid grid, std::size_t channels, std::vector<Complex> values)
    : grid_(grid), channels_(channels), values_(std::move(values)) {
  if (values_.size() != grid_.size() * channels_) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "spectral value count does not match n*d");
  }
}

SpectralSignal forward(const WeightedSignal& f) {
  const auto& grid = f.grid();
  const std::size_t n = grid.size();
  const std::size_t d = f.channels();
  std::vector<Complex> buf(n * d);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex factor = std::exp(-grid.nu() * grid.time(j)) * centring_twiddle(j, n);
    for (std::size_t c = 0; c < d; ++c) buf[j * d + c] = factor * f(j, c);
  }
  std::vector<Complex> out(n * d);
  execute(buf, out, n, d, FFTW_FORWARD);
  const double scale = grid.dt() / std::sqrt(2.0 * std::numbers::pi);
  const double tau = grid.time(0);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex phase = std::polar(scale, -grid.frequency(k) * tau);
    for (std::size_t c = 0; c < d; ++c) out[k * d + c] *= phase;
  }
  return SpectralSignal(grid, d, std::move(out));
}

WeightedSignal inverse(const SpectralSignal& F) {
  const auto& grid = F.grid();
  const std::size_t n = grid.size();
  const std::size_t d = F.channels();
  const double tau = grid.time(0);
  std::vector<Complex> buf(n * d);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex phase = std::polar(1.0, grid.frequency(k) * tau);
    for (std::size_t c = 0; c < d; ++c) buf[k * d + c] = phase * F(k, c);
  }
  std::vector<Complex> out(n * d);
  execute(buf, out, n, d, FFTW_BACKWARD);
  const double scale = std::sqrt(2.0 * std::numbers::pi) / (static_cast<double>(n) * grid.dt());
  for (std::size_t j = 0; j < n; ++j) {
    const Complex factor = scale * std::exp(grid.nu() * grid.time(j)) * std::conj(centring_twiddle(j, n));
    for (std::size_t c = 0; c < d; ++c) out[j * d + c] *= factor;
  }
  return WeightedSignal(grid, d, std::move(out));
}

Complex spectral_inner_product(const SpectralSignal& F, const SpectralSignal& G) {
  if (!(F.grid() == G.grid()) || F.channels() != G.channels()) {
    throw Error(ErrorKind::kIncompatibleGrids, kModule, "spectra do not share grid and channel count");
  }
  Complex acc{};
  for (std::size_t i = 0; i < F.values().size(); ++i) acc += std::conj(F.values()[i]) * G.values()[i];
  return acc * F.grid().frequency_step();
}

WeightedSignal apply_spectral(const WeightedSignal& f, std::size_t out_channels, const SpectralKernel& kernel,
                              unsigned threads) {
  const SpectralSignal F = forward(f);
  SpectralSignal G(f.grid(), out_channels);
  parallel_for(F.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) kernel(k, F.symbol(k), F.slice(k), G.slice(k));
  });
  return inverse(G);
}

WeightedSignal apply_d0(const WeightedSignal& f, int k) {
  if (k < -2 || k > 2) {
    throw Error(ErrorKind::kUnsupportedOrder, kModule,
                "derivative order " + std::to_string(k) + " outside {-2..2}");
  }
  if (k == 0) return f;
  return apply_spectral(f, f.channels(), [k](std::size_t, Complex lamhat, std::span<const Complex> in,
                                             std::span<Complex> out) {
    Complex m{1.0, 0.0};
    const Complex base = k > 0 ? lamhat : 1.0 / lamhat;
    for (int i = 0; i < std::abs(k); ++i) m *= base;
    for (std::size_t c = 0; c < in.size(); ++c) out[c] = m * in[c];
  });
}

WeightedSignal antiderivative_oracle(const WeightedSignal& f) {
  const auto& grid = f.grid();
  const std::size_t d = f.channels();
  WeightedSignal out(grid, d);
  const double half = 0.5 * grid.dt();
  for (std::size_t c = 0; c < d; ++c) {
    // From the window start (value 0) to the first centre is half a step.
    Complex acc = half * 0.5 * f(0, c);
    out(0, c) = acc;
    for (std::size_t j = 1; j < grid.size(); ++j) {
      acc += half * (f(j - 1, c) + f(j, c));
      out(j, c) = acc;
    }
  }
  return out;
}

WeightedSignal apply_function(const OperatorFunction& M, const WeightedSignal& f, unsigned threads) {
  if (M.dim() != f.channels()) {
    throw Error(ErrorKind::kInvalidArgument, kModule,
                "operator dimension " + std::to_string(M.dim()) + " does not match channel count " +
                    std::to_string(f.channels()));
  }
  const std::size_t d = f.channels();
  return apply_spectral(
      f, d,
      [&](std::size_t, Complex lamhat, std::span<const Complex> in, std::span<Complex> out) {
        const Complex z = 1.0 / lamhat;
        Matrix m;
        try {
          m = M.evaluate(z);
        } catch (const Error& e) {
          throw NumericalError(ErrorKind::kFunctionEvaluation, kModule,
                               std::string("evaluation failed at xi = ") + std::to_string(lamhat.imag()) + ": " +
                                   e.what(),
                               lamhat.imag(), 0.0);
        }
        for (std::size_t r = 0; r < d; ++r) {
          Complex acc{};
          for (std::size_t c = 0; c < d; ++c) acc += m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * in[c];
          out[r] = acc;
        }
      },
      threads);
}

}  // namespace evocalc
