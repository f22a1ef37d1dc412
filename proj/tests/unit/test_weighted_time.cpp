#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "expect_error.hpp"
#include "support.hpp"

namespace evocalc {
namespace {

using testing::throws_kind;

WeightedSignal indicator(const TimeGrid& g, double lo, double hi) {
  return WeightedSignal::from_scalar(g, [=](double t) { return Complex(t >= lo && t <= hi ? 1.0 : 0.0); });
}

TEST(TimeGrid, RejectsInvalidParameters) {
  EXPECT_TRUE(throws_kind([] { TimeGrid(0.0, 0.0, 8, 1.0); }, ErrorKind::kInvalidArgument));
  EXPECT_TRUE(throws_kind([] { TimeGrid(0.0, 0.1, 1, 1.0); }, ErrorKind::kInvalidArgument));
  EXPECT_TRUE(throws_kind([] { TimeGrid(0.0, 0.1, 8, 0.0); }, ErrorKind::kInvalidArgument));
  EXPECT_TRUE(throws_kind([] { TimeGrid(0.0, 0.1, 8, -1.0); }, ErrorKind::kInvalidArgument));
}

TEST(TimeGrid, CellCentresAndFrequencies) {
  const TimeGrid g(-1.0, 0.25, 8, 2.0);
  EXPECT_DOUBLE_EQ(g.time(0), -0.875);
  EXPECT_DOUBLE_EQ(g.t_end(), 1.0);
  EXPECT_DOUBLE_EQ(g.frequency(4), 0.0);
  EXPECT_NEAR(g.frequency(0), -2.0 * std::numbers::pi * 4.0 / 2.0, 1e-12);
  EXPECT_NEAR(g.aliasing_budget(), std::exp(-4.0), 1e-15);
  EXPECT_TRUE(g.satisfies_aliasing_bound(0.02));
  EXPECT_FALSE(g.satisfies_aliasing_bound(1e-3));
}

TEST(WeightedSignal, RejectsNonFiniteSamples) {
  const TimeGrid g(0.0, 0.1, 4, 1.0);
  std::vector<Complex> bad(4, 1.0);
  bad[2] = std::nan("");
  EXPECT_TRUE(throws_kind([&] { WeightedSignal(g, 1, bad); }, ErrorKind::kInvalidArgument));
  EXPECT_TRUE(throws_kind([&] { WeightedSignal(g, 2, std::vector<Complex>(3)); }, ErrorKind::kInvalidArgument));
}

TEST(InnerProduct, IndicatorClosedForm) {
  const TimeGrid g(-2.0, 1e-3, 6000, 1.0);
  const WeightedSignal f = indicator(g, 0.0, 1.0);
  const double exact = (1.0 - std::exp(-2.0)) / 2.0;
  EXPECT_NEAR(inner_product(f, f).real(), exact, 1e-5);
  EXPECT_NEAR(inner_product(f, f).imag(), 0.0, 1e-15);

  const WeightedSignal gi = Complex(0.0, 1.0) * f;
  const Complex fg = inner_product(f, gi);
  EXPECT_NEAR(fg.real(), 0.0, 1e-12);
  EXPECT_NEAR(fg.imag(), exact, 1e-5);
  const Complex gf = inner_product(gi, f);
  EXPECT_NEAR(std::abs(fg - std::conj(gf)), 0.0, 1e-14);
}

TEST(InnerProduct, ZeroAndMismatch) {
  const TimeGrid g(0.0, 0.01, 100, 1.0);
  std::mt19937_64 rng(3);
  const WeightedSignal f = testing::random_bumps(g, rng, 0.2, 0.8, 0.05, 0.1);
  EXPECT_EQ(inner_product(WeightedSignal::zeros(g, 1), f), Complex(0.0));
  const WeightedSignal other = WeightedSignal::zeros(g.with_nu(2.0), 1);
  EXPECT_TRUE(throws_kind([&] { inner_product(f, other); }, ErrorKind::kIncompatibleGrids));
  EXPECT_TRUE(throws_kind([&] { inner_product(f, WeightedSignal::zeros(g, 2)); }, ErrorKind::kIncompatibleGrids));
}

TEST(InnerProduct, PositivityAndCauchySchwarz) {
  const TimeGrid g = testing::window(10.0, 1024);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const WeightedSignal f = testing::random_bumps(g, rng, 1.0, 5.0, 0.1, 0.5, 3, 2);
    const WeightedSignal h = testing::random_bumps(g, rng, 1.0, 5.0, 0.1, 0.5, 3, 2);
    EXPECT_GT(inner_product(f, f).real(), 0.0);
    EXPECT_LE(std::abs(inner_product(f, h)), weighted_norm(f) * weighted_norm(h) + 1e-12);
  }
  EXPECT_EQ(inner_product(WeightedSignal::zeros(g, 2), WeightedSignal::zeros(g, 2)), Complex(0.0));
}

TEST(WeightedNorm, OrderZeroIsRootOfInnerProduct) {
  const TimeGrid g = testing::window(8.0, 512);
  std::mt19937_64 rng(5);
  const WeightedSignal f = testing::random_bumps(g, rng, 1.0, 3.0, 0.2, 0.4);
  EXPECT_EQ(weighted_norm(f, 0), std::sqrt(inner_product(f, f).real()));
  for (int k = -2; k <= 2; ++k) EXPECT_EQ(weighted_norm(WeightedSignal::zeros(g, 1), k), 0.0);
}

TEST(WeightedNorm, UnsupportedOrder) {
  const TimeGrid g(0.0, 0.1, 16, 1.0);
  const WeightedSignal f = WeightedSignal::zeros(g, 1);
  EXPECT_TRUE(throws_kind([&] { weighted_norm(f, 3); }, ErrorKind::kUnsupportedOrder));
  EXPECT_TRUE(throws_kind([&] { weighted_norm(f, -3); }, ErrorKind::kUnsupportedOrder));
}

TEST(WeightedNorm, FirstDerivativeOfGaussianMatchesQuadrature) {
  const double nu = 1.0;
  const TimeGrid g(-6.0, 12.0 / 4096.0, 4096, nu);
  const WeightedSignal f = WeightedSignal::from_scalar(g, [](double t) { return Complex(std::exp(-t * t)); });
  // Oracle: midpoint quadrature of |f'|^2 e^{-2 nu t} on a much finer grid.
  const std::size_t fine = 1 << 18;
  const double h = 12.0 / static_cast<double>(fine);
  double acc = 0.0;
  for (std::size_t i = 0; i < fine; ++i) {
    const double t = -6.0 + (static_cast<double>(i) + 0.5) * h;
    const double df = -2.0 * t * std::exp(-t * t);
    acc += df * df * std::exp(-2.0 * nu * t) * h;
  }
  const double expected = std::sqrt(acc);
  EXPECT_NEAR(weighted_norm(f, 1) / expected, 1.0, 1e-4);
}

TEST(Cutoff, IndicatorIdempotenceAndDisjointSupport) {
  const TimeGrid g(-2.0, 1e-2, 400, 1.0);
  const WeightedSignal f = indicator(g, -1.0, 1.0);
  const WeightedSignal c = cutoff(f, 0.0);
  EXPECT_EQ(testing::max_abs_diff(c, indicator(g, -1.0, 0.0)), 0.0);
  EXPECT_EQ(testing::max_abs_diff(cutoff(c, 0.0), c), 0.0);
  EXPECT_TRUE(cutoff(indicator(g, 0.5, 1.0), 0.2).is_zero());
  EXPECT_EQ(testing::max_abs_diff(cutoff(f, 10.0), f), 0.0);
  EXPECT_TRUE(cutoff(f, -5.0).is_zero());
}

TEST(Cutoff, Contraction) {
  const TimeGrid g = testing::window(6.0, 600);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const WeightedSignal f = testing::random_bumps(g, rng, 0.5, 5.5, 0.1, 0.6);
    const double a = 6.0 * std::uniform_real_distribution<double>()(rng);
    EXPECT_LE(weighted_norm(cutoff(f, a)), weighted_norm(f));
  }
}

TEST(Translate, IdentityInverseAndWeightLaw) {
  const TimeGrid g = testing::window(8.0, 800);
  std::mt19937_64 rng(23);
  const WeightedSignal f = testing::random_bumps(g, rng, 3.0, 5.0, 0.1, 0.3);
  EXPECT_EQ(testing::max_abs_diff(translate(f, 0.0), f), 0.0);
  const double h = -0.5;  // 50 steps
  const WeightedSignal back = translate(translate(f, h), -h);
  EXPECT_LT(testing::max_abs_diff(back, f), 1e-15);
  const double ratio = weighted_norm(translate(f, h)) / weighted_norm(f);
  EXPECT_NEAR(ratio / std::exp(g.nu() * h), 1.0, 1e-8);
}

TEST(Translate, ShiftDirectionAndDroppedSamples) {
  const TimeGrid g(0.0, 1.0, 6, 1.0);
  WeightedSignal f(g, 1, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
  const WeightedSignal fwd = translate(f, 2.0);  // f(t + 2)
  EXPECT_EQ(fwd(0, 0), Complex(3.0));
  EXPECT_EQ(fwd(3, 0), Complex(6.0));
  EXPECT_EQ(fwd(4, 0), Complex(0.0));
  const WeightedSignal back = translate(f, -1.0);
  EXPECT_EQ(back(0, 0), Complex(0.0));
  EXPECT_EQ(back(5, 0), Complex(5.0));
}

TEST(Translate, NonGridShiftNeedsSpectralRoute) {
  const TimeGrid g(0.0, 0.1, 10, 1.0);
  EXPECT_TRUE(throws_kind([&] { translate(WeightedSignal::zeros(g, 1), 0.05); }, ErrorKind::kRequiresSpectralRoute));
}

TEST(WeightedSignal, ArithmeticAndReweighting) {
  const TimeGrid g(0.0, 0.5, 4, 1.0);
  WeightedSignal a(g, 1, {1.0, 2.0, 3.0, 4.0});
  WeightedSignal b(g, 1, {0.5, 0.5, 0.5, 0.5});
  const WeightedSignal sum = a + b;
  const WeightedSignal diff = a - b;
  EXPECT_EQ(sum(3, 0), Complex(4.5));
  EXPECT_EQ(diff(0, 0), Complex(0.5));
  EXPECT_EQ((Complex(0, 2) * a)(1, 0), Complex(0, 4));
  EXPECT_DOUBLE_EQ(a.max_abs(), 4.0);
  const WeightedSignal r = a.reweighted(3.0);
  EXPECT_EQ(r.grid().nu(), 3.0);
  EXPECT_EQ(r.samples(), a.samples());
  EXPECT_TRUE(throws_kind([&] { a += r; }, ErrorKind::kIncompatibleGrids));
}

}  // namespace
}  // namespace evocalc
