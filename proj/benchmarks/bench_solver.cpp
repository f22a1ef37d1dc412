#include <benchmark/benchmark.h>

#include <cmath>

#include "evocalc/banded.hpp"
#include "evocalc/evo_solver.hpp"
#include "evocalc/sl_reduction.hpp"

namespace {

using namespace evocalc;

EvoProblem make_problem(std::size_t nt, std::size_t nx) {
  const TimeGrid tg(0.0, 8.0 / static_cast<double>(nt), nt, 22.0 / 8.0);
  const SpatialGrid sg = SpatialGrid::from_nodes(nx);
  ImpedanceLaw imp;
  imp.left.a0 = -1.0;
  imp.right.a0 = 1.0;
  WeightedSignal src = make_source(tg, sg);
  for (std::size_t j = 0; j < nt; ++j) {
    const double u = (tg.time(j) - 1.5) / 0.08;
    const double pt = std::exp(-u * u);
    if (pt < 1e-16) continue;
    for (std::size_t x = 0; x < nx; ++x) {
      const double dx = sg.node(x) / 0.1;
      src(j, source_channel(Field::kV, x, nx)) = pt * std::exp(-dx * dx);
    }
  }
  return EvoProblem(tg, sg, Coefficients::constant(sg, 1.5, 1.0, 1.0, 0.2, Complex(0.5, 0.1), 0.3), imp, src);
}

// One frequency: assemble and factor the interleaved (s, v) band system.
void BM_FrequencySystem(benchmark::State& state) {
  const SpatialGrid sg = SpatialGrid::from_nodes(static_cast<std::size_t>(state.range(0)));
  const Coefficients c = Coefficients::constant(sg, 1.5, 1.0, 1.0, 0.2, Complex(0.5, 0.1), 0.3);
  ImpedanceLaw imp;
  imp.left.a0 = -1.0;
  imp.right.a0 = 1.0;
  const SystemSkeleton sk(sg);
  const std::vector<Complex> b(sk.unknowns(), 1.0);
  for (auto _ : state) {
    const BandLU lu(sk.assemble(c, imp, Complex(2.75, 40.0)));
    auto x = lu.solve(b);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_FrequencySystem)->Arg(201)->Arg(801)->Arg(3201);

// Full per-frequency loop; the second argument is the thread count.
void BM_Solve(benchmark::State& state) {
  const EvoProblem p = make_problem(static_cast<std::size_t>(state.range(0)), 201);
  for (auto _ : state) {
    auto sol = solve(p, static_cast<unsigned>(state.range(1)));
    benchmark::DoNotOptimize(sol.v.samples().data());
  }
}
BENCHMARK(BM_Solve)->Args({1024, 1})->Args({1024, 4})->Args({4096, 4})->Unit(benchmark::kMillisecond);

void BM_SolveScalar(benchmark::State& state) {
  const ScalarSLProblem sp = reduce(make_problem(1024, 201));
  const auto mode = state.range(0) == 0 ? ScalarMode::kConservative : ScalarMode::kComposed;
  for (auto _ : state) {
    auto sol = solve_scalar(sp, mode, 4);
    benchmark::DoNotOptimize(sol.y.samples().data());
  }
}
BENCHMARK(BM_SolveScalar)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
