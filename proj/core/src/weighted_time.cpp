#include "evocalc/weighted_time.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "evocalc/error.hpp"
#include "evocalc/fourier_laplace.hpp"

namespace evocalc {
namespace {

constexpr const char* kModule = "weighted_time";

}  // namespace

TimeGrid::TimeGrid(double t0, double dt, std::size_t n, double nu) : t0_(t0), dt_(dt), n_(n), nu_(nu) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "time grid requires dt > 0");
  }
  if (n < 2) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "time grid requires n >= 2");
  }
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "time grid requires nu > 0");
  }
  if (!std::isfinite(t0)) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "time grid requires a finite t0");
  }
}

double TimeGrid::frequency(std::size_t k) const noexcept {
  const auto shift = static_cast<double>(n_ / 2);
  return frequency_step() * (static_cast<double>(k) - shift);
}

double TimeGrid::frequency_step() const noexcept {
  return 2.0 * std::numbers::pi / (static_cast<double>(n_) * dt_);
}

double TimeGrid::aliasing_budget() const noexcept { return std::exp(-nu_ * length()); }

bool TimeGrid::satisfies_aliasing_bound(double eps_alias) const noexcept {
  return nu_ * length() >= std::log(1.0 / eps_alias);
}

WeightedSignal::WeightedSignal(TimeGrid grid, std::size_t channels)
    : grid_(grid), channels_(channels), samples_(grid.size() * channels) {
  if (channels == 0) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "signal needs at least one channel");
  }
}

WeightedSignal::WeightedSignal(TimeGrid grid, std::size_t channels, std::vector<Complex> samples)
    : grid_(grid), channels_(channels), samples_(std::move(samples)) {
  if (channels == 0) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "signal needs at least one channel");
  }
  if (samples_.size() != grid_.size() * channels_) {
    throw Error(ErrorKind::kInvalidArgument, kModule,
                "sample count " + std::to_string(samples_.size()) + " does not match n*d = " +
                    std::to_string(grid_.size() * channels_));
  }
  for (const auto& z : samples_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorKind::kInvalidArgument, kModule, "signal samples must be finite");
    }
  }
}

WeightedSignal WeightedSignal::from_function(const TimeGrid& grid, std::size_t channels,
                                             const std::function<Complex(double, std::size_t)>& fn) {
  std::vector<Complex> samples(grid.size() * channels);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double t = grid.time(j);
    for (std::size_t c = 0; c < channels; ++c) samples[j * channels + c] = fn(t, c);
  }
  return WeightedSignal(grid, channels, std::move(samples));
}

WeightedSignal WeightedSignal::from_scalar(const TimeGrid& grid, const std::function<Complex(double)>& fn) {
  return from_function(grid, 1, [&](double t, std::size_t) { return fn(t); });
}

bool WeightedSignal::is_zero() const noexcept {
  return std::all_of(samples_.begin(), samples_.end(), [](const Complex& z) { return z == Complex{}; });
}

double WeightedSignal::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& z : samples_) m = std::max(m, std::abs(z));
  return m;
}

WeightedSignal WeightedSignal::reweighted(double nu) const {
  return WeightedSignal(grid_.with_nu(nu), channels_, samples_);
}

WeightedSignal& WeightedSignal::operator+=(const WeightedSignal& other) {
  require_same_layout(*this, other, kModule);
  for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += other.samples_[i];
  return *this;
}

WeightedSignal& WeightedSignal::operator-=(const WeightedSignal& other) {
  require_same_layout(*this, other, kModule);
  for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= other.samples_[i];
  return *this;
}

WeightedSignal& WeightedSignal::operator*=(Complex alpha) {
  for (auto& z : samples_) z *= alpha;
  return *this;
}

WeightedSignal operator+(WeightedSignal a, const WeightedSignal& b) { return a += b; }
WeightedSignal operator-(WeightedSignal a, const WeightedSignal& b) { return a -= b; }
WeightedSignal operator*(Complex alpha, WeightedSignal a) { return a *= alpha; }

void require_same_layout(const WeightedSignal& f, const WeightedSignal& g, const char* module) {
  if (!(f.grid() == g.grid()) || f.channels() != g.channels()) {
    throw Error(ErrorKind::kIncompatibleGrids, module, "signals do not share grid and channel count");
  }
}

Complex inner_product(const WeightedSignal& f, const WeightedSignal& g) {
  require_same_layout(f, g, kModule);
  const auto& grid = f.grid();
  const std::size_t d = f.channels();
  Complex acc{};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double w = std::exp(-2.0 * grid.nu() * grid.time(j));
    Complex slice_acc{};
    for (std::size_t c = 0; c < d; ++c) slice_acc += std::conj(f(j, c)) * g(j, c);
    acc += w * slice_acc;
  }
  return acc * grid.dt();
}

double weighted_norm(const WeightedSignal& f, int k) {
  if (k < -2 || k > 2) {
    throw Error(ErrorKind::kUnsupportedOrder, kModule,
                "Sobolev index " + std::to_string(k) + " outside {-2..2}");
  }
  if (k == 0) return std::sqrt(std::max(0.0, inner_product(f, f).real()));
  const auto g = apply_d0(f, k);
  return std::sqrt(std::max(0.0, inner_product(g, g).real()));
}

WeightedSignal cutoff(const WeightedSignal& f, double a) {
  WeightedSignal out = f;
  const auto& grid = f.grid();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (grid.time(j) > a) {
      for (auto& z : out.slice(j)) z = Complex{};
    }
  }
  return out;
}

WeightedSignal translate(const WeightedSignal& f, double h) {
  const auto& grid = f.grid();
  const double steps = h / grid.dt();
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, std::abs(steps))) {
    throw Error(ErrorKind::kRequiresSpectralRoute, kModule,
                "shift " + std::to_string(h) + " is not a multiple of dt; use a delay law");
  }
  const auto m = static_cast<long long>(rounded);
  const auto n = static_cast<long long>(grid.size());
  WeightedSignal out(grid, f.channels());
  for (long long j = 0; j < n; ++j) {
    const long long src = j + m;
    if (src < 0 || src >= n) continue;
    auto dst = out.slice(static_cast<std::size_t>(j));
    const auto from = f.slice(static_cast<std::size_t>(src));
    std::copy(from.begin(), from.end(), dst.begin());
  }
  return out;
}

}  // namespace evocalc
