#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include "evocalc/evocalc.hpp"

namespace evocalc::testing {

// exp(-((t - c)/w)^2), flushed to zero below 1e-16 so the support is compact.
inline double pulse(double t, double centre, double width) {
  const double u = (t - centre) / width;
  const double v = std::exp(-u * u);
  return v < 1e-16 ? 0.0 : v;
}

// Centre for a pulse whose first nonzero value sits at or after onset.
inline double pulse_centre(double onset, double width) { return onset + 6.5 * width; }

// Window [t0, t0 + T] with nu chosen so that nu T = nu_t.
inline TimeGrid window(double length, std::size_t n, double nu_t = 22.0, double t0 = 0.0) {
  return TimeGrid(t0, length / static_cast<double>(n), n, nu_t / length);
}

// Sum of a few random complex Gaussian bumps with centres in [lo, hi].
inline WeightedSignal random_bumps(const TimeGrid& g, std::mt19937_64& rng, double lo, double hi, double wmin,
                                   double wmax, int bumps = 3, std::size_t channels = 1) {
  std::uniform_real_distribution<double> u01;
  std::normal_distribution<double> normal;
  std::vector<double> centre(static_cast<std::size_t>(bumps) * channels);
  std::vector<double> width(centre.size());
  std::vector<Complex> amp(centre.size());
  for (std::size_t i = 0; i < centre.size(); ++i) {
    centre[i] = lo + (hi - lo) * u01(rng);
    width[i] = wmin + (wmax - wmin) * u01(rng);
    amp[i] = {normal(rng), normal(rng)};
  }
  return WeightedSignal::from_function(g, channels, [&](double t, std::size_t c) {
    Complex acc{};
    for (int b = 0; b < bumps; ++b) {
      const std::size_t i = c * static_cast<std::size_t>(bumps) + static_cast<std::size_t>(b);
      acc += amp[i] * pulse(t, centre[i], width[i]);
    }
    return acc;
  });
}

// Space-time source with f_field(t, x) = pulse(t) * bump(x) and zeros elsewhere.
inline WeightedSignal pulse_source(const TimeGrid& tg, const SpatialGrid& sg, Field field, double onset,
                                   double width, double x0 = 0.0, double xw = 0.1) {
  WeightedSignal src = make_source(tg, sg);
  const std::size_t nx = sg.size();
  const double centre = pulse_centre(onset, width);
  for (std::size_t j = 0; j < tg.size(); ++j) {
    const double pt = pulse(tg.time(j), centre, width);
    if (pt == 0.0) continue;
    for (std::size_t x = 0; x < nx; ++x) {
      const double dx = (sg.node(x) - x0) / xw;
      src(j, source_channel(field, x, nx)) = pt * std::exp(-dx * dx);
    }
  }
  return src;
}

inline ImpedanceLaw impedance(double a0_left, double a1_left, double a0_right, double a1_right,
                              double a2_left = 0.0, double a2_right = 0.0) {
  ImpedanceLaw imp;
  imp.left = {a0_left, a1_left, a2_left, std::nullopt};
  imp.right = {a0_right, a1_right, a2_right, std::nullopt};
  return imp;
}

inline double max_abs_diff(const WeightedSignal& a, const WeightedSignal& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.samples().size(); ++i) m = std::max(m, std::abs(a.samples()[i] - b.samples()[i]));
  return m;
}

inline double relative_norm_diff(const WeightedSignal& a, const WeightedSignal& b) {
  const double den = weighted_norm(b);
  const double num = weighted_norm(a - b);
  return den > 0.0 ? num / den : num;
}

/**
 * Manufactured continuum solution with a0, a1 impedance terms:
 *   s = g sigma, w = g omega, v = g' phi + g psi,
 * where phi(e) = a0(e) sigma(e), psi(e) = a1(e) sigma(e), g a Gaussian in time.
 */
struct Manufactured {
  double kappa0 = 1.5;
  double kappa1 = 1.0;
  double eps = 1.0;
  Complex eta{0.2, 0.0};
  Complex mu0{0.5, 0.1};
  Complex mu1{0.3, 0.0};
  double a0l = -1.0, a1l = -0.5, a0r = 0.5, a1r = 0.2;
  double centre = 2.0;
  double width = 0.35;

  ImpedanceLaw law() const { return impedance(a0l, a1l, a0r, a1r); }
  Coefficients coefficients(const SpatialGrid& sg) const {
    return Coefficients::constant(sg, kappa0, kappa1, eps, eta, mu0, mu1);
  }

  static double sigma(double x) { return 1.0 + 0.5 * std::sin(std::numbers::pi * x) + x * x; }
  static double dsigma(double x) { return 0.5 * std::numbers::pi * std::cos(std::numbers::pi * x) + 2.0 * x; }
  static double omega(double x) { return std::cos(2.0 * x); }
  // Linear interpolant of end values plus a bubble.
  static double lin(double x, double left, double right) { return left + (right - left) * (x + 0.5); }
  double phi(double x) const {
    return lin(x, a0l * sigma(-0.5), a0r * sigma(0.5)) + (x * x - 0.25) * std::sin(3.0 * x);
  }
  double dphi(double x) const {
    return a0r * sigma(0.5) - a0l * sigma(-0.5) + 2.0 * x * std::sin(3.0 * x) + 3.0 * (x * x - 0.25) * std::cos(3.0 * x);
  }
  double psi(double x) const { return lin(x, a1l * sigma(-0.5), a1r * sigma(0.5)) + 0.5 * (x * x - 0.25); }
  double dpsi(double x) const { return a1r * sigma(0.5) - a1l * sigma(-0.5) + x; }

  double g(double t) const {
    const double u = (t - centre) / width;
    return std::exp(-u * u);
  }
  double dg(double t) const { return -2.0 * (t - centre) / (width * width) * g(t); }
  double ddg(double t) const {
    const double u = (t - centre) / width;
    return (4.0 * u * u - 2.0) / (width * width) * g(t);
  }
  double big_g(double t) const {
    return 0.5 * width * std::sqrt(std::numbers::pi) * (std::erf((t - centre) / width) + 1.0);
  }

  EvoFields exact(const TimeGrid& tg, const SpatialGrid& sg) const {
    const std::size_t nx = sg.size();
    auto make = [&](auto fn) {
      return WeightedSignal::from_function(tg, nx, [&](double t, std::size_t j) { return fn(t, sg.node(j)); });
    };
    return {make([&](double t, double x) { return Complex(g(t) * sigma(x)); }),
            make([&](double t, double x) { return Complex(g(t) * omega(x)); }),
            make([&](double t, double x) { return Complex(dg(t) * phi(x) + g(t) * psi(x)); })};
  }

  WeightedSignal source(const TimeGrid& tg, const SpatialGrid& sg) const {
    const std::size_t nx = sg.size();
    WeightedSignal src = make_source(tg, sg);
    for (std::size_t j = 0; j < tg.size(); ++j) {
      const double t = tg.time(j);
      const double gg = g(t), dgg = dg(t), ddgg = ddg(t), gi = big_g(t);
      for (std::size_t i = 0; i < nx; ++i) {
        const double x = sg.node(i);
        const Complex v = dgg * phi(x) + gg * psi(x);
        const Complex dv = dgg * dphi(x) + gg * dpsi(x);
        const Complex dtv = ddgg * phi(x) + dgg * psi(x);
        const Complex iv = gg * phi(x) + gi * psi(x);
        src(j, source_channel(Field::kS, i, nx)) = kappa0 * dgg * sigma(x) + dv;
        src(j, source_channel(Field::kW, i, nx)) = kappa1 * dgg * omega(x) - std::conj(mu0) * v;
        src(j, source_channel(Field::kV, i, nx)) =
            gg * dsigma(x) + mu0 * gg * omega(x) + eps * dtv + eta * v + mu1 * iv;
      }
    }
    return src;
  }
};

}  // namespace evocalc::testing
