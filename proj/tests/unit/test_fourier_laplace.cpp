#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "expect_error.hpp"
#include "support.hpp"

namespace evocalc {
namespace {

using testing::throws_kind;

WeightedSignal noise(const TimeGrid& g, std::size_t channels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  std::vector<Complex> s(g.size() * channels);
  for (auto& z : s) z = {n(rng), n(rng)};
  return WeightedSignal(g, channels, std::move(s));
}

TEST(Forward, ZeroSpectrumAndRoundTrip) {
  const TimeGrid g = testing::window(4.0, 256);
  const SpectralSignal z = forward(WeightedSignal::zeros(g, 2));
  for (const Complex& v : z.values()) EXPECT_EQ(v, Complex(0.0));
  EXPECT_TRUE(inverse(z).is_zero());
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const WeightedSignal f = noise(g, 3, seed);
    const WeightedSignal back = inverse(forward(f));
    EXPECT_LT(testing::relative_norm_diff(back, f), 1e-12);
  }
}

TEST(Forward, Plancherel) {
  // Non-power-of-two length exercises the general FFT path.
  const TimeGrid g = testing::window(6.0, 1000, 12.0, -1.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const WeightedSignal f = noise(g, 2, seed);
    const WeightedSignal h = noise(g, 2, seed + 100);
    const Complex time = inner_product(f, h);
    const Complex freq = spectral_inner_product(forward(f), forward(h));
    EXPECT_LT(std::abs(time - freq) / std::abs(time), 1e-10);
    EXPECT_NEAR(std::sqrt(spectral_inner_product(forward(f), forward(f)).real()) / weighted_norm(f), 1.0, 1e-10);
  }
}

TEST(Forward, GaussianMapsToGaussian) {
  const double nu = 1.5, tc = 6.0;
  const TimeGrid g(0.0, 12.0 / 2048.0, 2048, nu);
  const WeightedSignal f = WeightedSignal::from_scalar(
      g, [&](double t) { return std::exp(nu * t) * std::exp(-(t - tc) * (t - tc)); });
  const SpectralSignal F = forward(f);
  // Continuum pair: (1/sqrt(2 pi)) int e^{-i xi t} e^{-(t - tc)^2} dt = e^{-i xi tc} e^{-xi^2/4} / sqrt(2).
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double xi = g.frequency(k);
    const Complex expected = std::exp(Complex(0.0, -xi * tc)) * std::exp(-xi * xi / 4.0) / std::sqrt(2.0);
    worst = std::max(worst, std::abs(F(k, 0) - expected));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Inverse, SingleBinIsWeightedExponential) {
  const TimeGrid g(0.5, 0.01, 200, 2.0);
  SpectralSignal F(g, 1);
  const std::size_t k = 107;
  F(k, 0) = 1.0;
  const WeightedSignal f = inverse(F);
  const double xi = g.frequency(k);
  // f(t) / (e^{nu t} e^{i xi t}) must be constant.
  const Complex ref = f(0, 0) / std::exp(Complex(g.nu(), xi) * g.time(0));
  for (std::size_t j = 1; j < g.size(); ++j) {
    const Complex c = f(j, 0) / std::exp(Complex(g.nu(), xi) * g.time(j));
    EXPECT_LT(std::abs(c - ref), 1e-12 * std::abs(ref));
  }
}

TEST(ApplyD0, IdentityInverseAndOrderLimit) {
  const TimeGrid g = testing::window(10.0, 1024);
  std::mt19937_64 rng(9);
  const WeightedSignal f = testing::random_bumps(g, rng, 2.0, 4.0, 0.2, 0.4);
  EXPECT_LT(testing::max_abs_diff(apply_d0(f, 0), f), 1e-14);
  EXPECT_LT(testing::relative_norm_diff(apply_d0(apply_d0(f, -1), 1), f), 1e-10);
  EXPECT_LT(testing::relative_norm_diff(apply_d0(apply_d0(f, 2), -2), f), 1e-10);
  EXPECT_TRUE(throws_kind([&] { apply_d0(f, 3); }, ErrorKind::kUnsupportedOrder));
}

TEST(ApplyD0, AntiderivativeOfStepIsRamp) {
  const TimeGrid g(-1.0, 1e-3, 5000, 5.0);
  const WeightedSignal step = WeightedSignal::from_scalar(g, [](double t) { return Complex(t >= 0.0 ? 1.0 : 0.0); });
  const WeightedSignal ramp = WeightedSignal::from_scalar(g, [](double t) { return Complex(t >= 0.0 ? t : 0.0); });
  EXPECT_LT(testing::relative_norm_diff(apply_d0(step, -1), ramp), 1e-3);
}

TEST(ApplyD0, NormBoundAndNearExtremal) {
  const TimeGrid g = testing::window(10.0, 2048, 60.0);
  const double nu = g.nu();
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const WeightedSignal f = testing::random_bumps(g, rng, 1.0, 9.0, 0.05, 1.0);
    EXPECT_LE(weighted_norm(apply_d0(f, -1)) / weighted_norm(f), 1.0 / nu + 1e-9);
  }
  // e^{nu t} times a broad Gaussian concentrates the spectrum near xi = 0.
  const double sigma = 8.0 / nu;
  const WeightedSignal ext = WeightedSignal::from_scalar(g, [&](double t) {
    const double u = (t - 5.0) / sigma;
    return Complex(std::exp(nu * (t - 5.0)) * std::exp(-u * u));
  });
  const double ratio = weighted_norm(apply_d0(ext, -1)) / weighted_norm(ext);
  EXPECT_GE(ratio, 0.98 / nu);
  EXPECT_LE(ratio, 1.0 / nu + 1e-9);
}

TEST(AntiderivativeOracle, ZeroIndicatorAndAgreement) {
  const TimeGrid g(0.0, 1e-3, 4000, 10.0);
  EXPECT_TRUE(antiderivative_oracle(WeightedSignal::zeros(g, 1)).is_zero());
  const WeightedSignal ind =
      WeightedSignal::from_scalar(g, [](double t) { return Complex(t >= 1.0 && t <= 2.0 ? 1.0 : 0.0); });
  const WeightedSignal ramp = antiderivative_oracle(ind);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double t = g.time(j);
    const double expected = std::clamp(t - 1.0, 0.0, 1.0);
    EXPECT_NEAR(ramp(j, 0).real(), expected, 2e-3) << "t = " << t;
  }

  // The antiderivative stays constant after the bump, so keep it far from the window end.
  const TimeGrid w = testing::window(20.0, 16384, 40.0);
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const WeightedSignal f = testing::random_bumps(w, rng, 8.0, 10.0, 0.6, 1.2);
    const double diff = testing::relative_norm_diff(apply_d0(f, -1), antiderivative_oracle(f));
    EXPECT_LT(diff, std::max(1e-6, w.aliasing_budget()));
  }
}

TEST(ApplyFunction, IdentityAndZ) {
  const TimeGrid g = testing::window(10.0, 1024);
  std::mt19937_64 rng(13);
  const WeightedSignal f = testing::random_bumps(g, rng, 2.0, 4.0, 0.2, 0.4, 3, 2);
  // Weighted norms: e^{nu t} magnifies round-off at late times in absolute terms.
  EXPECT_LT(testing::relative_norm_diff(apply_function(OperatorFunction::identity(2), f), f), 1e-12);
  const OperatorFunction z = OperatorFunction::polynomial(2, {{1, Matrix::Identity(2, 2)}});
  EXPECT_LT(testing::relative_norm_diff(apply_function(z, f), apply_d0(f, -1)), 1e-12);
  EXPECT_TRUE(throws_kind([&] { apply_function(OperatorFunction::identity(3), f); }, ErrorKind::kInvalidArgument));
}

TEST(ApplyFunction, DelayMatchesTranslate) {
  const TimeGrid g = testing::window(8.0, 2048);
  std::mt19937_64 rng(19);
  const OperatorFunction delay = delay_function(-0.25, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const WeightedSignal f = testing::random_bumps(g, rng, 2.0, 3.0, 0.1, 0.2);
    EXPECT_LT(testing::max_abs_diff(apply_function(delay, f), translate(f, -0.25)), 1e-8 * f.max_abs());
  }
}

TEST(ApplyFunction, OutsideRegionIsFunctionEvaluationError) {
  // Radius 0.01 excludes z = 1/(i xi + nu) once nu is small.
  const OperatorFunction m = OperatorFunction::polynomial(1, {{0, Matrix::Identity(1, 1)}}, 0.01);
  const TimeGrid g(0.0, 0.1, 64, 1.0);
  try {
    apply_function(m, WeightedSignal::zeros(g, 1));
    FAIL() << "expected a function-evaluation error";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFunctionEvaluation);
    EXPECT_TRUE(std::isfinite(e.xi()));
  }
}

TEST(ApplyFunction, NuIndependence) {
  const TimeGrid g1 = testing::window(10.0, 4096, 30.0);
  const TimeGrid g2 = g1.with_nu(2.0 * g1.nu());
  std::mt19937_64 rng(29);
  const OperatorFunction poly = OperatorFunction::scalar_polynomial({1.0, 0.5, 0.25});
  const OperatorFunction delay = delay_function(-0.3, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const WeightedSignal f = testing::random_bumps(g1, rng, 3.0, 5.0, 0.2, 0.4);
    for (const OperatorFunction* m : {&poly, &delay}) {
      const WeightedSignal a = apply_function(*m, f);
      const WeightedSignal b = apply_function(*m, f.reweighted(g2.nu())).reweighted(g1.nu());
      EXPECT_LT(testing::relative_norm_diff(a, b), std::max(1e-6, g1.aliasing_budget() + g2.aliasing_budget()));
    }
  }
}

TEST(ApplyFunction, CausalLawsRespectSupport) {
  // The z term integrates f, so the output never decays; a larger nu T damps its wrap-around.
  const TimeGrid g = testing::window(10.0, 2048, 40.0);
  std::mt19937_64 rng(37);
  const double a = 3.0;
  const OperatorFunction law = OperatorFunction::sum(
      {OperatorFunction::scalar_polynomial({1.0, -0.4, 0.2}), delay_function(-0.5, 1)});
  const WeightedSignal f = cutoff(testing::random_bumps(g, rng, 3.6, 4.2, 0.05, 0.08), 100.0);
  ASSERT_TRUE(cutoff(f, a).is_zero());
  const WeightedSignal out = apply_function(law, f);
  EXPECT_LT(weighted_norm(cutoff(out, a - g.dt())) / weighted_norm(out), 1e-7);
}

TEST(ApplyFunction, ThreadCountDoesNotChangeResult) {
  const TimeGrid g = testing::window(10.0, 4096);
  std::mt19937_64 rng(43);
  const WeightedSignal f = testing::random_bumps(g, rng, 2.0, 4.0, 0.1, 0.4, 3, 3);
  const OperatorFunction m = OperatorFunction::polynomial(
      3, {{0, Matrix::Identity(3, 3)}, {1, Matrix::Constant(3, 3, Complex(0.1, 0.2))}});
  const WeightedSignal one = apply_function(m, f, 1);
  const WeightedSignal many = apply_function(m, f, 4);
  EXPECT_LE(testing::max_abs_diff(one, many), 1e-13 * one.max_abs());
}

TEST(ApplySpectral, KernelSeesSymbols) {
  const TimeGrid g(0.0, 0.05, 64, 3.0);
  std::vector<Complex> seen(g.size());
  apply_spectral(WeightedSignal::zeros(g, 1), 1,
                 [&](std::size_t k, Complex lamhat, std::span<const Complex>, std::span<Complex>) { seen[k] = lamhat; });
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(seen[k], Complex(3.0, g.frequency(k)));
}

}  // namespace
}  // namespace evocalc
