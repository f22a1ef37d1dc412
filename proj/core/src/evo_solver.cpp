#include "evocalc/evo_solver.hpp"

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

constexpr const char* kModule = "evo_solver";

WeightedSignal pack(const EvoFields& u) {
  const std::size_t nx = u.s.channels();
  WeightedSignal out(u.s.grid(), 3 * nx);
  for (std::size_t j = 0; j < u.s.size(); ++j) {
    for (std::size_t x = 0; x < nx; ++x) {
      out(j, x) = u.s(j, x);
      out(j, nx + x) = u.w(j, x);
      out(j, 2 * nx + x) = u.v(j, x);
    }
  }
  return out;
}

double squared_norm(const WeightedSignal& f, const SpatialGrid& g) {
  const double n = space_time_norm(f, g);
  return n * n;
}

}  // namespace

WeightedSignal make_source(const TimeGrid& tgrid, const SpatialGrid& sgrid) {
  return WeightedSignal(tgrid, 3 * sgrid.size());
}

EvoProblem::EvoProblem(TimeGrid tgrid, SpatialGrid sgrid, Coefficients coeffs, ImpedanceLaw imp,
                       WeightedSignal source, ProblemTolerances tol)
    : tgrid_(tgrid),
      sgrid_(sgrid),
      coeffs_(std::move(coeffs)),
      imp_(std::move(imp)),
      source_(std::move(source)),
      tol_(tol) {
  coeffs_.validate(sgrid_);
  imp_.validate();
  if (!(source_.grid() == tgrid_) || source_.channels() != 3 * sgrid_.size()) {
    throw Error(ErrorKind::kIncompatibleGrids, kModule,
                "source must live on the problem time grid with 3 channels per spatial node");
  }
  if (coeffs_.has_memory() && !coeffs_.memory->is_causal()) {
    throw Error(ErrorKind::kInvalidArgument, kModule, "memory kernel must be causal");
  }
  for (std::size_t j = 0; j < sgrid_.size(); ++j) {
    if (coeffs_.kappa1[j] <= 0.0) {
      throw Error(ErrorKind::kElimination, kModule, "kappa1 must be positive to eliminate w (node " +
                                                        std::to_string(j) + ")");
    }
  }
  const double margin = material_margin();
  if (!(margin >= tol_.c0)) {
    std::ostringstream msg;
    msg << "material margin nu eps + Re eta = " << margin << " is below c0 = " << tol_.c0;
    throw Error(ErrorKind::kPrecondition, "material_law", msg.str());
  }
  admissibility_ = impedance_admissibility(imp_, nu());
  if (!admissibility_.pass) {
    throw Error(ErrorKind::kPrecondition, "spatial_system",
                "impedance admissibility failed: " + admissibility_.violations.front());
  }
  if (!tgrid_.satisfies_aliasing_bound(tol_.eps_alias)) {
    std::ostringstream msg;
    msg << "aliasing bound violated: e^{-nu T} = " << tgrid_.aliasing_budget() << " exceeds eps_alias = "
        << tol_.eps_alias;
    throw Error(ErrorKind::kPrecondition, "weighted_time", msg.str());
  }
}

std::optional<double> EvoProblem::source_onset() const {
  for (std::size_t j = 0; j < source_.size(); ++j) {
    for (const Complex& c : source_.slice(j)) {
      if (c != Complex{}) return tgrid_.time(j);
    }
  }
  return std::nullopt;
}

EvoProblem EvoProblem::with_source(WeightedSignal source) const {
  return EvoProblem(tgrid_, sgrid_, coeffs_, imp_, std::move(source), tol_);
}

std::optional<double> estimate_nu_threshold(const Coefficients& coeffs, const ImpedanceLaw& imp, double c0,
                                            double lo, double hi) {
  auto ok = [&](double nu) {
    return coeffs.material_margin(nu) >= c0 && impedance_admissibility(imp, nu).pass;
  };
  if (!ok(hi)) return std::nullopt;
  if (ok(lo)) return lo;
  while (hi / lo > 1.0 + 1e-9) {
    const double mid = std::sqrt(lo * hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

EvoSolution solve(const EvoProblem& p, unsigned threads) {
  if (threads == 0) threads = default_thread_count();
  const TimeGrid& tg = p.tgrid();
  const std::size_t nx = p.sgrid().size();
  const std::size_t nt = tg.size();
  const SystemSkeleton skeleton(p.sgrid());
  const Coefficients& coeffs = p.coeffs();

  const SpectralSignal f = forward(p.source());
  SpectralSignal s_hat(tg, nx);
  SpectralSignal w_hat(tg, nx);
  SpectralSignal v_hat(tg, nx);
  std::vector<double> residuals(nt, 0.0);
  std::vector<double> pivots(nt, 0.0);

  parallel_for(nt, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const Complex lamhat = f.symbol(k);
      const auto slice = f.slice(k);
      const auto f1 = slice.subspan(0, nx);
      const auto f2 = slice.subspan(nx, nx);
      const auto f3 = slice.subspan(2 * nx, nx);

      const BandMatrix a = skeleton.assemble(coeffs, p.impedance(), lamhat);
      const auto b = skeleton.rhs(coeffs, lamhat, f1, f2, f3);
      const BandLU lu(a);
      if (lu.singular()) {
        throw NumericalError(ErrorKind::kSingularSystem, kModule, "singular frequency system",
                             tg.frequency(k), std::numeric_limits<double>::infinity());
      }
      auto x = lu.solve(b);
      double r = relative_residual(a, x, b);
      if (r > 1e-13) {
        // One step of iterative refinement.
        const auto ax = a.multiply(x);
        std::vector<Complex> defect(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) defect[i] = b[i] - ax[i];
        const auto dx = lu.solve(defect);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
        r = relative_residual(a, x, b);
      }
      if (r > p.tolerances().residual) {
        std::ostringstream msg;
        msg << "relative residual " << r << " exceeds " << p.tolerances().residual;
        throw NumericalError(ErrorKind::kSingularSystem, kModule, msg.str(), tg.frequency(k), lu.pivot_ratio());
      }
      residuals[k] = r;
      pivots[k] = lu.pivot_ratio();

      std::vector<Complex> v(nx);
      for (std::size_t j = 0; j < nx; ++j) {
        s_hat(k, j) = x[SystemSkeleton::s_index(j)];
        v[j] = x[SystemSkeleton::v_index(j)];
        v_hat(k, j) = v[j];
      }
      const auto w = skeleton.reconstruct_w(coeffs, lamhat, f2, v);
      std::copy(w.begin(), w.end(), w_hat.slice(k).begin());
    }
  });

  EvoSolution sol{inverse(s_hat), inverse(w_hat), inverse(v_hat), p.sgrid(), coeffs, p.source_onset(), {}};
  Diagnostics& d = sol.diagnostics;
  d.c0_material = p.material_margin();
  d.impedance_margins = {p.admissibility().margin_left, p.admissibility().margin_right};
  d.solve_residual = *std::max_element(residuals.begin(), residuals.end());
  d.max_pivot_ratio = *std::max_element(pivots.begin(), pivots.end());
  d.energy_trace = energy_trace(sol);
  if (sol.source_onset) {
    d.causality_time = *sol.source_onset;
    d.causality_residual = causality_residual(sol, *sol.source_onset);
  }
  d.nu_threshold = estimate_nu_threshold(coeffs, p.impedance(), p.tolerances().c0);
  return sol;
}

WeightedSignal apply_operator(const SpatialGrid& sgrid, const Coefficients& coeffs, const EvoFields& u) {
  coeffs.validate(sgrid);
  const std::size_t nx = sgrid.size();
  if (u.s.channels() != nx || u.w.channels() != nx || u.v.channels() != nx) {
    throw Error(ErrorKind::kIncompatibleGrids, kModule, "fields must have one channel per spatial node");
  }
  const BandMatrix d = derivative_matrix(sgrid, Closure::kSummationByParts);
  return apply_spectral(pack(u), 3 * nx,
                        [&](std::size_t, Complex lamhat, std::span<const Complex> in, std::span<Complex> out) {
                          const auto s = in.subspan(0, nx);
                          const auto w = in.subspan(nx, nx);
                          const auto v = in.subspan(2 * nx, nx);
                          const auto ds = d.multiply(s);
                          const auto dv = d.multiply(v);
                          const Complex mem = coeffs.has_memory()
                                                  ? coeffs.memory->evaluate_scalar(1.0 / lamhat)
                                                  : Complex{};
                          for (std::size_t j = 0; j < nx; ++j) {
                            Complex lower = coeffs.mu1[j];
                            if (coeffs.has_memory()) lower += mem * coeffs.memory_weight[j];
                            out[j] = lamhat * coeffs.kappa0[j] * s[j] + dv[j];
                            out[nx + j] = lamhat * coeffs.kappa1[j] * w[j] - std::conj(coeffs.mu0[j]) * v[j];
                            out[2 * nx + j] = ds[j] + coeffs.mu0[j] * w[j] +
                                              (coeffs.eps[j] * lamhat + coeffs.eta[j] + lower / lamhat) * v[j];
                          }
                        });
}

WeightedSignal boundary_defect(const SpatialGrid& sgrid, const ImpedanceLaw& imp, const EvoFields& u) {
  const std::size_t last = sgrid.size() - 1;
  WeightedSignal traces(u.s.grid(), 4);
  for (std::size_t j = 0; j < u.s.size(); ++j) {
    traces(j, 0) = u.s(j, 0);
    traces(j, 1) = u.s(j, last);
    traces(j, 2) = u.v(j, 0);
    traces(j, 3) = u.v(j, last);
  }
  return apply_spectral(traces, 2,
                        [&](std::size_t, Complex lamhat, std::span<const Complex> in, std::span<Complex> out) {
                          const Complex z = 1.0 / lamhat;
                          out[0] = lamhat * imp.left.evaluate(z) * in[0] - in[2];
                          out[1] = lamhat * imp.right.evaluate(z) * in[1] - in[3];
                        });
}

double causality_residual(const EvoSolution& sol, double a) {
  const TimeGrid& tg = sol.s.grid();
  if (sol.source_onset && *sol.source_onset < a - 1e-9 * tg.dt()) {
    std::ostringstream msg;
    msg << "source is nonzero at t = " << *sol.source_onset << " < a = " << a;
    throw Error(ErrorKind::kMisuse, kModule, msg.str());
  }
  const double cut = a - tg.dt();
  const double num = squared_norm(cutoff(sol.s, cut), sol.sgrid) + squared_norm(cutoff(sol.w, cut), sol.sgrid) +
                     squared_norm(cutoff(sol.v, cut), sol.sgrid);
  const double den =
      squared_norm(sol.s, sol.sgrid) + squared_norm(sol.w, sol.sgrid) + squared_norm(sol.v, sol.sgrid);
  if (den == 0.0) return 0.0;
  return std::sqrt(num / den);
}

std::vector<double> energy_trace(const EvoSolution& sol) {
  const std::size_t nt = sol.s.size();
  const std::size_t nx = sol.sgrid.size();
  std::vector<double> e(nt, 0.0);
  for (std::size_t j = 0; j < nt; ++j) {
    double acc = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      acc += sol.sgrid.weight(x) * (sol.coeffs.kappa0[x] * std::norm(sol.s(j, x)) +
                                    sol.coeffs.kappa1[x] * std::norm(sol.w(j, x)) +
                                    sol.coeffs.eps[x] * std::norm(sol.v(j, x)));
    }
    e[j] = 0.5 * acc;
  }
  return e;
}

double relative_difference(const EvoFields& a, const EvoFields& b, const SpatialGrid& sgrid) {
  const double num = squared_norm(a.s - b.s, sgrid) + squared_norm(a.w - b.w, sgrid) + squared_norm(a.v - b.v, sgrid);
  const double den = squared_norm(b.s, sgrid) + squared_norm(b.w, sgrid) + squared_norm(b.v, sgrid);
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

}  // namespace evocalc
