#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <vector>

#include "evocalc/error.hpp"
#include "evocalc/evo_solver.hpp"

namespace evocalc {
namespace {

constexpr const char* kModule = "evo_solver";

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using Vector = Eigen::VectorXcd;
using Triplet = Eigen::Triplet<Complex>;

// State per node j: (s, w, v, y) at 4j..4j+3 with y' = v; then S_left, S_right
// with S' = s at the ends.
struct Layout {
  std::size_t nx;
  std::size_t s(std::size_t j) const { return 4 * j; }
  std::size_t w(std::size_t j) const { return 4 * j + 1; }
  std::size_t v(std::size_t j) const { return 4 * j + 2; }
  std::size_t y(std::size_t j) const { return 4 * j + 3; }
  std::size_t big_s(bool right) const { return 4 * nx + (right ? 1 : 0); }
  std::size_t size() const { return 4 * nx + 2; }
};

}  // namespace

EvoSolution time_step_oracle(const EvoProblem& p) {
  const Coefficients& c = p.coeffs();
  const ImpedanceLaw& imp = p.impedance();
  if (c.has_memory()) {
    throw Error(ErrorKind::kOracleUnavailable, kModule, "time-step oracle does not support memory kernels");
  }
  for (const auto* e : {&imp.left, &imp.right}) {
    if (e->remainder && !e->remainder->is_zero()) {
      throw Error(ErrorKind::kOracleUnavailable, kModule,
                  "time-step oracle needs an impedance law truncated after a2");
    }
  }

  const TimeGrid& tg = p.tgrid();
  const SpatialGrid& sg = p.sgrid();
  const std::size_t nx = sg.size();
  const std::size_t last = nx - 1;
  const BandMatrix d = derivative_matrix(sg, Closure::kSummationByParts);
  const Layout L{nx};
  const auto n = static_cast<Eigen::Index>(L.size());
  const double dt = tg.dt();

  // M x' + K x = F; rows with an empty M row are algebraic and enforced at the new level.
  std::vector<Triplet> mt;
  std::vector<Triplet> kt;
  auto idx = [](std::size_t i) { return static_cast<Eigen::Index>(i); };
  auto add_m = [&](std::size_t r, std::size_t col, Complex val) {
    if (val != Complex{}) mt.emplace_back(idx(r), idx(col), val);
  };
  auto add_k = [&](std::size_t r, std::size_t col, Complex val) {
    if (val != Complex{}) kt.emplace_back(idx(r), idx(col), val);
  };
  auto d_row = [&](std::size_t j, auto&& fn) {
    const std::size_t lo = j > 0 ? j - 1 : 0;
    const std::size_t hi = std::min(last, j + 1);
    for (std::size_t m = lo; m <= hi; ++m) fn(m, d(j, m));
  };

  for (std::size_t j = 0; j < nx; ++j) {
    add_m(L.s(j), L.s(j), c.kappa0[j]);
    d_row(j, [&](std::size_t m, Complex dm) { add_k(L.s(j), L.v(m), dm); });

    add_m(L.w(j), L.w(j), c.kappa1[j]);
    add_k(L.w(j), L.v(j), -std::conj(c.mu0[j]));

    add_m(L.y(j), L.y(j), 1.0);
    add_k(L.y(j), L.v(j), -1.0);

    if (j == 0 || j == last) continue;
    add_m(L.v(j), L.v(j), c.eps[j]);
    add_k(L.v(j), L.v(j), c.eta[j]);
    add_k(L.v(j), L.y(j), c.mu1[j]);
    add_k(L.v(j), L.w(j), c.mu0[j]);
    d_row(j, [&](std::size_t m, Complex dm) { add_k(L.v(j), L.s(m), dm); });
  }
  // Boundary: d0(a0 + a1 d0^{-1} + a2 d0^{-2}) s = v with a0 s' taken from the s-row:
  //   v_e + (a0/kappa0) (D v)_e - a1 s_e - a2 S_e = (a0/kappa0) f1_e.
  std::vector<double> f1_scale(2, 0.0);
  for (const bool right : {false, true}) {
    const std::size_t e = right ? last : 0;
    const EndpointImpedance& a = right ? imp.right : imp.left;
    double ratio = 0.0;
    if (a.a0 != 0.0) {
      if (c.kappa0[e] == 0.0) {
        throw Error(ErrorKind::kOracleUnavailable, kModule, "a0 != 0 needs kappa0 > 0 at the boundary");
      }
      ratio = a.a0 / c.kappa0[e];
    }
    f1_scale[right ? 1 : 0] = ratio;
    add_k(L.v(e), L.v(e), 1.0);
    d_row(e, [&](std::size_t m, Complex dm) { add_k(L.v(e), L.v(m), ratio * dm); });
    add_k(L.v(e), L.s(e), -a.a1);
    add_k(L.v(e), L.big_s(right), -a.a2);
    add_m(L.big_s(right), L.big_s(right), 1.0);
    add_k(L.big_s(right), L.s(e), -1.0);
  }

  SparseMatrix m(n, n);
  SparseMatrix k(n, n);
  m.setFromTriplets(mt.begin(), mt.end());
  k.setFromTriplets(kt.begin(), kt.end());

  std::vector<bool> algebraic(L.size(), true);
  for (Eigen::Index col = 0; col < m.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
      if (it.value() != Complex{}) algebraic[static_cast<std::size_t>(it.row())] = false;
    }
  }

  // Implicit matrix (M/dt + K/2 on differential rows, K on algebraic rows) and
  // explicit matrix (M/dt - K/2, zero on algebraic rows).
  std::vector<Triplet> at;
  std::vector<Triplet> bt;
  for (const auto& t : mt) {
    at.emplace_back(t.row(), t.col(), t.value() / dt);
    bt.emplace_back(t.row(), t.col(), t.value() / dt);
  }
  for (const auto& t : kt) {
    if (algebraic[static_cast<std::size_t>(t.row())]) {
      at.emplace_back(t.row(), t.col(), t.value());
    } else {
      at.emplace_back(t.row(), t.col(), 0.5 * t.value());
      bt.emplace_back(t.row(), t.col(), -0.5 * t.value());
    }
  }
  SparseMatrix a(n, n);
  SparseMatrix b(n, n);
  a.setFromTriplets(at.begin(), at.end());
  b.setFromTriplets(bt.begin(), bt.end());
  a.makeCompressed();

  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorKind::kSingularSystem, kModule, "time-step matrix is singular: " + lu.lastErrorMessage());
  }

  const WeightedSignal& src = p.source();
  auto forcing = [&](std::size_t j) {
    Vector f = Vector::Zero(n);
    for (std::size_t x = 0; x < nx; ++x) {
      f(idx(L.s(x))) = src(j, source_channel(Field::kS, x, nx));
      f(idx(L.w(x))) = src(j, source_channel(Field::kW, x, nx));
      if (x != 0 && x != last) f(idx(L.v(x))) = src(j, source_channel(Field::kV, x, nx));
    }
    f(idx(L.v(0))) = f1_scale[0] * src(j, source_channel(Field::kS, 0, nx));
    f(idx(L.v(last))) = f1_scale[1] * src(j, source_channel(Field::kS, last, nx));
    return f;
  };

  EvoSolution sol{WeightedSignal(tg, nx), WeightedSignal(tg, nx), WeightedSignal(tg, nx), sg, c,
                  p.source_onset(), {}};
  Vector x = Vector::Zero(n);
  Vector f_old = forcing(0);
  double worst = 0.0;
  for (std::size_t j = 1; j < tg.size(); ++j) {
    const Vector f_new = forcing(j);
    Vector rhs = b * x;
    for (Eigen::Index i = 0; i < n; ++i) {
      rhs(i) += algebraic[static_cast<std::size_t>(i)] ? f_new(i) : 0.5 * (f_old(i) + f_new(i));
    }
    x = lu.solve(rhs);
    const double rn = rhs.norm();
    if (rn > 0.0) worst = std::max(worst, (a * x - rhs).norm() / rn);
    for (std::size_t node = 0; node < nx; ++node) {
      sol.s(j, node) = x(idx(L.s(node)));
      sol.w(j, node) = x(idx(L.w(node)));
      sol.v(j, node) = x(idx(L.v(node)));
    }
    f_old = f_new;
  }

  Diagnostics& diag = sol.diagnostics;
  diag.c0_material = p.material_margin();
  diag.impedance_margins = {p.admissibility().margin_left, p.admissibility().margin_right};
  diag.solve_residual = worst;
  diag.energy_trace = energy_trace(sol);
  if (sol.source_onset) {
    diag.causality_time = *sol.source_onset;
    diag.causality_residual = causality_residual(sol, *sol.source_onset);
  }
  return sol;
}

}  // namespace evocalc
