#include "evocalc/sl_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "evocalc/banded.hpp"
#include "evocalc/error.hpp"
#include "evocalc/fourier_laplace.hpp"
#include "evocalc/parallel.hpp"

namespace evocalc {
namespace {

constexpr const char* kModule = "sl_reduction";

bool is_dirichlet(const EndpointImpedance& e) { return e.is_zero(); }

double harmonic(double a, double b) { return 2.0 * a * b / (a + b); }

double relative(const WeightedSignal& a, const WeightedSignal& b, const SpatialGrid& g) {
  const double num = space_time_norm(a - b, g);
  const double den = space_time_norm(b, g);
  return den > 0.0 ? num / den : num;
}

}  // namespace

Complex ScalarSLProblem::q_at(std::size_t j, Complex lamhat) const {
  Complex out = q[j];
  if (memory && !memory->is_zero()) out += memory->evaluate_scalar(1.0 / lamhat) * memory_weight[j];
  return out;
}

ScalarSLProblem reduce(const EvoProblem& p) {
  const std::size_t nx = p.sgrid().size();
  const Coefficients& c = p.coeffs();
  const WeightedSignal& src = p.source();
  for (std::size_t j = 0; j < src.size(); ++j) {
    for (std::size_t x = 0; x < nx; ++x) {
      if (src(j, source_channel(Field::kS, x, nx)) != Complex{} ||
          src(j, source_channel(Field::kW, x, nx)) != Complex{}) {
        throw Error(ErrorKind::kReductionUnsupported, kModule,
                    "the scalar reduction needs f1 = f2 = 0; only the v-row may carry a source");
      }
    }
  }
  ScalarSLProblem sp{p.tgrid(), p.sgrid(), {}, {}, {}, c.eta, p.impedance(), WeightedSignal(p.tgrid(), nx),
                     c.kappa1, c.mu0, c.memory, c.memory_weight, false};
  sp.r.resize(nx);
  sp.q.resize(nx);
  sp.p.resize(nx);
  bool all_eps_zero = true;
  for (std::size_t x = 0; x < nx; ++x) {
    if (!(c.kappa0[x] > 0.0) || !(c.kappa1[x] > 0.0)) {
      throw Error(ErrorKind::kElimination, kModule,
                  "kappa0 and kappa1 must be positive at node " + std::to_string(x));
    }
    sp.r[x] = c.eps[x];
    sp.q[x] = std::norm(c.mu0[x]) / c.kappa1[x] + c.mu1[x];
    sp.p[x] = 1.0 / c.kappa0[x];
    all_eps_zero = all_eps_zero && c.eps[x] == 0.0;
  }
  sp.parabolic = all_eps_zero;
  for (std::size_t j = 0; j < src.size(); ++j) {
    for (std::size_t x = 0; x < nx; ++x) sp.f(j, x) = src(j, source_channel(Field::kV, x, nx));
  }
  return sp;
}

std::pair<Complex, Complex> robin_coefficients(const ScalarSLProblem& sp, Complex lamhat) {
  const Complex z = 1.0 / lamhat;
  return {sp.imp.left.evaluate(z), sp.imp.right.evaluate(z)};
}

BandMatrix scalar_matrix(const ScalarSLProblem& sp, Complex lamhat, ScalarMode mode) {
  const std::size_t nx = sp.sgrid.size();
  const std::size_t last = nx - 1;
  const Complex lambda = lamhat * lamhat;
  const auto [a_left, a_right] = robin_coefficients(sp, lamhat);
  auto rho = [&](std::size_t j) { return sp.r[j] * lambda + sp.eta[j] * lamhat + sp.q_at(j, lamhat); };

  if (mode == ScalarMode::kComposed) {
    const BandMatrix d = derivative_matrix(sp.sgrid, Closure::kSummationByParts);
    BandMatrix m(nx, 2, 2);
    auto add_dpd_row = [&](std::size_t j, Complex scale) {
      // scale * sum_m D_jm p_m D_mk
      for (std::size_t mm = (j > 0 ? j - 1 : 0); mm <= std::min(last, j + 1); ++mm) {
        const Complex djm = d(j, mm);
        if (djm == Complex{}) continue;
        for (std::size_t k = (mm > 0 ? mm - 1 : 0); k <= std::min(last, mm + 1); ++k) {
          m.add(j, k, scale * djm * sp.p[mm] * d(mm, k));
        }
      }
    };
    for (std::size_t j = 1; j < last; ++j) {
      m.add(j, j, rho(j));
      add_dpd_row(j, -1.0);
    }
    for (const auto& [e, a] : {std::pair{std::size_t{0}, a_left}, std::pair{last, a_right}}) {
      m.add(e, e, 1.0);
      for (std::size_t k = (e > 0 ? e - 1 : 0); k <= std::min(last, e + 1); ++k) m.add(e, k, a * sp.p[e] * d(e, k));
    }
    return m;
  }

  const double h = sp.sgrid.hx();
  BandMatrix m(nx, 1, 1);
  for (std::size_t j = 1; j < last; ++j) {
    const double pl = harmonic(sp.p[j - 1], sp.p[j]);
    const double pr = harmonic(sp.p[j], sp.p[j + 1]);
    m.at(j, j - 1) = -pl / h;
    m.at(j, j) = h * rho(j) + (pl + pr) / h;
    m.at(j, j + 1) = -pr / h;
  }
  const double p_first = harmonic(sp.p[0], sp.p[1]);
  const double p_last = harmonic(sp.p[last - 1], sp.p[last]);
  if (is_dirichlet(sp.imp.left)) {
    m.at(0, 0) = 1.0;
  } else {
    m.at(0, 0) = 0.5 * h * rho(0) + p_first / h - 1.0 / a_left;
    m.at(0, 1) = -p_first / h;
  }
  if (is_dirichlet(sp.imp.right)) {
    m.at(last, last) = 1.0;
  } else {
    m.at(last, last) = 0.5 * h * rho(last) + p_last / h + 1.0 / a_right;
    m.at(last, last - 1) = -p_last / h;
  }
  return m;
}

std::vector<Complex> scalar_rhs(const ScalarSLProblem& sp, std::span<const Complex> f, ScalarMode mode) {
  const std::size_t nx = sp.sgrid.size();
  const std::size_t last = nx - 1;
  std::vector<Complex> b(f.begin(), f.end());
  if (mode == ScalarMode::kComposed) {
    b[0] = 0.0;
    b[last] = 0.0;
    return b;
  }
  const double h = sp.sgrid.hx();
  for (auto& v : b) v *= h;
  b[0] = is_dirichlet(sp.imp.left) ? Complex{} : 0.5 * b[0];
  b[last] = is_dirichlet(sp.imp.right) ? Complex{} : 0.5 * b[last];
  return b;
}

ScalarSolution solve_scalar(const ScalarSLProblem& sp, ScalarMode mode, unsigned threads) {
  if (threads == 0) threads = default_thread_count();
  const std::size_t nx = sp.sgrid.size();
  if (sp.f.channels() != nx || !(sp.f.grid() == sp.tgrid)) {
    throw Error(ErrorKind::kIncompatibleGrids, kModule, "scalar source must have one channel per node");
  }
  for (std::size_t j = 0; j < nx; ++j) {
    if (!(sp.p[j] > 0.0) || !(sp.r[j] >= 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, kModule, "need p > 0 and r >= 0 at every node");
    }
  }
  const TimeGrid& tg = sp.tgrid;
  const BandMatrix d = derivative_matrix(sp.sgrid, Closure::kSummationByParts);
  const SpectralSignal f = forward(sp.f);
  SpectralSignal y_hat(tg, nx);
  SpectralSignal s_hat(tg, nx);
  SpectralSignal w_hat(tg, nx);
  SpectralSignal v_hat(tg, nx);
  std::vector<double> residuals(tg.size(), 0.0);

  parallel_for(tg.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const Complex lamhat = f.symbol(k);
      const BandMatrix m = scalar_matrix(sp, lamhat, mode);
      const auto b = scalar_rhs(sp, f.slice(k), mode);
      const BandLU lu(m);
      if (lu.singular()) {
        throw NumericalError(ErrorKind::kSingularSystem, kModule, "singular scalar system", tg.frequency(k),
                             std::numeric_limits<double>::infinity());
      }
      const auto y = lu.solve(b);
      residuals[k] = relative_residual(m, y, b);
      const auto dy = d.multiply(y);
      for (std::size_t j = 0; j < nx; ++j) {
        y_hat(k, j) = y[j];
        v_hat(k, j) = lamhat * y[j];
        s_hat(k, j) = -sp.p[j] * dy[j];
        w_hat(k, j) = std::conj(sp.mu0[j]) * y[j] / sp.kappa1[j];
      }
    }
  });

  ScalarSolution out{inverse(y_hat), inverse(s_hat), inverse(w_hat), inverse(v_hat), 0.0};
  out.solve_residual = *std::max_element(residuals.begin(), residuals.end());
  return out;
}

CompareReport compare_with_full(const EvoProblem& p, unsigned threads) {
  const ScalarSLProblem sp = reduce(p);
  const EvoSolution full = solve(p, threads);
  const ScalarSolution sc = solve_scalar(sp, ScalarMode::kComposed, threads);
  CompareReport r;
  r.diff_s = relative(sc.s, full.s, p.sgrid());
  r.diff_w = relative(sc.w, full.w, p.sgrid());
  r.diff_v = relative(sc.v, full.v, p.sgrid());
  r.max_diff = std::max({r.diff_s, r.diff_w, r.diff_v});
  r.full_residual = full.diagnostics.solve_residual;
  r.scalar_residual = sc.solve_residual;
  return r;
}

}  // namespace evocalc
