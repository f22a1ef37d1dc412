#include <gtest/gtest.h>

#include <cmath>

#include "expect_error.hpp"
#include "support.hpp"

namespace evocalc {
namespace {

using testing::throws_kind;

struct Case {
  TimeGrid tg = testing::window(8.0, 1024);
  SpatialGrid sg{50};
  Coefficients coeffs = Coefficients::constant(sg, 1.0, 1.0, 1.0, 0.0, 2.0, 3.0);
  ImpedanceLaw imp = testing::impedance(-1.0, -0.5, 0.5, 0.2);

  EvoProblem problem(Field f = Field::kV) const {
    return EvoProblem(tg, sg, coeffs, imp, testing::pulse_source(tg, sg, f, 1.0, 0.08));
  }
};

TEST(Reduce, WorkedCoefficientExample) {
  const Case c;
  const ScalarSLProblem sp = reduce(c.problem());
  for (std::size_t j = 0; j < c.sg.size(); ++j) {
    EXPECT_EQ(sp.r[j], 1.0);
    EXPECT_EQ(sp.q[j], Complex(7.0));
    EXPECT_EQ(sp.p[j], 1.0);
  }
  EXPECT_FALSE(sp.parabolic);
}

TEST(Reduce, ComplexMu0UsesModulus) {
  Case c;
  c.coeffs = Coefficients::constant(c.sg, 2.0, 4.0, 1.0, 0.1, Complex(1.0, 1.0), 0.5);
  const ScalarSLProblem sp = reduce(c.problem());
  EXPECT_NEAR(std::abs(sp.q[3] - Complex(0.5 + 2.0 / 4.0)), 0.0, 1e-15);
  EXPECT_EQ(sp.p[3], 0.5);
}

TEST(Reduce, ZeroCouplingAndParabolic) {
  Case c;
  c.coeffs = Coefficients::constant(c.sg, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0);
  for (const Complex& q : reduce(c.problem()).q) EXPECT_EQ(q, Complex(0.0));

  c.coeffs = Coefficients::constant(c.sg, 1.0, 1.0, 0.0, 0.5, 1.0, 0.0);
  const ScalarSLProblem sp = reduce(c.problem());
  EXPECT_TRUE(sp.parabolic);
  for (double r : sp.r) EXPECT_EQ(r, 0.0);
}

TEST(Reduce, Errors) {
  Case c;
  EXPECT_TRUE(throws_kind([&] { reduce(c.problem(Field::kS)); }, ErrorKind::kReductionUnsupported));
  EXPECT_TRUE(throws_kind([&] { reduce(c.problem(Field::kW)); }, ErrorKind::kReductionUnsupported));
  c.coeffs.kappa0[4] = 0.0;
  EXPECT_TRUE(throws_kind([&] { reduce(c.problem()); }, ErrorKind::kElimination));
}

TEST(ScalarMatrix, ComposedModeIsTheSchurComplement) {
  Case c;
  c.coeffs = Coefficients::constant(c.sg, 1.3, 0.8, 1.1, 0.2, Complex(0.4, 0.1), 0.3);
  for (std::size_t j = 0; j < c.sg.size(); ++j) c.coeffs.kappa0[j] = 1.0 + 0.3 * c.sg.node(j);
  const EvoProblem p = c.problem();
  const ScalarSLProblem sp = reduce(p);
  const std::size_t nx = c.sg.size();
  for (const Complex lam : {Complex(c.tg.nu(), 0.0), Complex(c.tg.nu(), 17.0), Complex(c.tg.nu(), -250.0)}) {
    const Eigen::MatrixXcd full = assemble_frequency_system(c.sg, p.coeffs(), p.impedance(), lam).to_dense();
    Eigen::MatrixXcd schur(nx, nx);
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t k = 0; k < nx; ++k) {
        const auto vi = static_cast<Eigen::Index>(2 * i + 1), vk = static_cast<Eigen::Index>(2 * k + 1);
        Complex acc = full(vi, vk);
        for (std::size_t m = 0; m < nx; ++m) {
          const auto sm = static_cast<Eigen::Index>(2 * m);
          acc -= full(vi, sm) * full(sm, vk) / full(sm, sm);
        }
        schur(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = lam * acc;
      }
    }
    // The impedance rows of the full system are the Robin rows scaled by -lamhat.
    schur.row(0) *= -1.0 / lam;
    schur.row(static_cast<Eigen::Index>(nx - 1)) *= -1.0 / lam;
    const Eigen::MatrixXcd scalar = scalar_matrix(sp, lam, ScalarMode::kComposed).to_dense();
    EXPECT_LT((schur - scalar).norm(), 1e-12 * scalar.norm()) << "lamhat = " << lam;
  }
}

TEST(ScalarMatrix, ConservativeModeSymmetricForRealData) {
  Case c;
  c.coeffs = Coefficients::constant(c.sg, 1.0, 1.0, 1.0, 0.0, 0.7, 0.2);
  for (std::size_t j = 0; j < c.sg.size(); ++j) c.coeffs.kappa0[j] = 1.0 + 0.5 * std::sin(3.0 * c.sg.node(j));
  const ScalarSLProblem sp = reduce(c.problem());
  const Eigen::MatrixXcd m = scalar_matrix(sp, Complex(c.tg.nu(), 0.0), ScalarMode::kConservative).to_dense();
  EXPECT_EQ((m - m.transpose()).norm(), 0.0);
}

TEST(ScalarMatrix, RobinContributionIsNonnegativeWhenAdmissible) {
  const Case c;
  const ScalarSLProblem sp = reduce(c.problem());
  const Complex lam{c.tg.nu(), 0.0};
  const auto [al, ar] = robin_coefficients(sp, lam);
  EXPECT_NEAR(al.real(), -1.0 - 0.5 / c.tg.nu(), 1e-14);
  EXPECT_NEAR(ar.real(), 0.5 + 0.2 / c.tg.nu(), 1e-14);
  EXPECT_GT((-1.0 / al).real(), 0.0);
  EXPECT_GT((1.0 / ar).real(), 0.0);
}

TEST(SolveScalar, SineEigenfunctionWithDirichletEnds) {
  std::vector<double> err;
  for (std::size_t n : {20u, 40u, 80u}) {
    Case c;
    c.sg = SpatialGrid(n);
    c.coeffs = Coefficients::constant(c.sg, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0);
    c.imp = ImpedanceLaw::zero();
    const ScalarSLProblem sp = reduce(c.problem());
    const Complex lamhat{c.tg.nu(), 3.0};
    const Complex lambda = lamhat * lamhat;
    std::vector<Complex> f(c.sg.size());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = std::sin(std::numbers::pi * (c.sg.node(j) + 0.5));
    const BandLU lu(scalar_matrix(sp, lamhat, ScalarMode::kConservative));
    const auto y = lu.solve(scalar_rhs(sp, f, ScalarMode::kConservative));
    double e = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      e = std::max(e, std::abs(y[j] - f[j] / (lambda + std::numbers::pi * std::numbers::pi)));
    }
    err.push_back(e);
  }
  EXPECT_LT(err.back(), 1e-4);
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_GT(std::log2(err[i - 1] / err[i]), 1.9);
}

TEST(SolveScalar, ZeroSourceAndReconstruction) {
  const Case c;
  const ScalarSLProblem zero = reduce(EvoProblem(c.tg, c.sg, c.coeffs, c.imp, make_source(c.tg, c.sg)));
  const ScalarSolution z = solve_scalar(zero);
  EXPECT_TRUE(z.y.is_zero());
  EXPECT_TRUE(z.s.is_zero());
  EXPECT_TRUE(z.w.is_zero());
  EXPECT_TRUE(z.v.is_zero());

  const ScalarSLProblem sp = reduce(c.problem());
  const ScalarSolution sol = solve_scalar(sp);
  const BandMatrix d = derivative_matrix(c.sg, Closure::kSummationByParts);
  WeightedSignal ds(c.tg, c.sg.size()), dw(c.tg, c.sg.size());
  for (std::size_t j = 0; j < c.tg.size(); ++j) {
    const auto dy = d.multiply(sol.y.slice(j));
    for (std::size_t x = 0; x < c.sg.size(); ++x) {
      ds(j, x) = sol.s(j, x) + sp.p[x] * dy[x];
      dw(j, x) = sol.w(j, x) - std::conj(sp.mu0[x]) * sol.y(j, x) / sp.kappa1[x];
    }
  }
  EXPECT_LT(space_time_norm(ds, c.sg), 1e-12 * space_time_norm(sol.s, c.sg));
  EXPECT_LT(space_time_norm(dw, c.sg), 1e-12 * space_time_norm(sol.w, c.sg));
  EXPECT_LT(testing::relative_norm_diff(sol.v.reweighted(c.tg.nu()), apply_d0(sol.y, 1)), 1e-10);
}

TEST(SolveScalar, ConservativeModeTracksFullSolver) {
  const Case c;
  const EvoProblem p = c.problem();
  const ScalarSolution sc = solve_scalar(reduce(p), ScalarMode::kConservative);
  const EvoSolution full = solve(p);
  // Different discretizations of one continuum problem: agree to discretization error.
  EXPECT_LT(relative_difference(sc.fields(), full.fields(), c.sg), 5e-2);
  EXPECT_LE(sc.solve_residual, 1e-10);
}

TEST(CompareWithFull, MixedCoefficients) {
  Case c;
  c.coeffs = Coefficients::constant(c.sg, 1.5, 0.7, 1.2, 0.3, Complex(0.6, -0.2), 0.4);
  for (std::size_t j = 0; j < c.sg.size(); ++j) {
    const double x = c.sg.node(j);
    c.coeffs.kappa0[j] = 1.5 + 0.4 * x;
    c.coeffs.eps[j] = 1.0 + 0.2 * std::cos(2.0 * x);
  }
  const CompareReport r = compare_with_full(c.problem());
  EXPECT_LE(r.max_diff, 1e-8);
  EXPECT_LE(r.full_residual, 1e-10);
  EXPECT_LE(r.scalar_residual, 1e-10);
}

TEST(CompareWithFull, ZeroSourceAndMemory) {
  Case c;
  const CompareReport zero =
      compare_with_full(EvoProblem(c.tg, c.sg, c.coeffs, c.imp, make_source(c.tg, c.sg)));
  EXPECT_EQ(zero.max_diff, 0.0);

  c.coeffs.memory = OperatorFunction::scalar_delay(-0.2, 0.4);
  c.coeffs.memory_weight.assign(c.sg.size(), 1.0);
  EXPECT_LE(compare_with_full(c.problem()).max_diff, 1e-8);
}

TEST(CompareWithFull, ConservativeConfigurationConservesEnergy) {
  Case c;
  c.tg = testing::window(8.0, 2048);
  c.sg = SpatialGrid(100);
  c.imp = ImpedanceLaw::zero();
  c.coeffs = Coefficients::constant(c.sg, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0);
  const EvoProblem p = c.problem();
  EXPECT_LE(compare_with_full(p).max_diff, 1e-8);

  const ScalarSolution sc = solve_scalar(reduce(p), ScalarMode::kComposed);
  EvoSolution as_full{sc.s, sc.w, sc.v, c.sg, c.coeffs, p.source_onset(), {}};
  const auto e = energy_trace(as_full);
  std::size_t ref = 0;
  while (c.tg.time(ref) < 2.2) ++ref;
  const auto stop = static_cast<std::size_t>(0.85 * static_cast<double>(c.tg.size()));
  for (std::size_t j = ref; j < stop; ++j) EXPECT_NEAR(e[j] / e[ref], 1.0, 1e-5);
}

}  // namespace
}  // namespace evocalc
