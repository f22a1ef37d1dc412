#include "evocalc/spatial_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "evocalc/error.hpp"
#include "evocalc/fourier_laplace.hpp"

namespace evocalc {
namespace {

constexpr const char* kModule = "spatial_system";

std::size_t closure_half_band(Closure closure) { return closure == Closure::kSecondOrderOneSided ? 2 : 1; }

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    std::ostringstream msg;
    msg << what << " has " << got << " entries, expected " << want;
    throw Error(ErrorKind::kInvalidArgument, kModule, msg.str());
  }
}

}  // namespace

SpatialGrid::SpatialGrid(std::size_t intervals) : n_(intervals) {
  if (intervals < 4) throw Error(ErrorKind::kInvalidArgument, kModule, "spatial grid requires N >= 4");
}

double SpatialGrid::node(std::size_t j) const noexcept {
  if (j == n_) return 0.5;
  return -0.5 + static_cast<double>(j) / static_cast<double>(n_);
}

double SpatialGrid::weight(std::size_t j) const noexcept { return (j == 0 || j == n_) ? 0.5 * hx() : hx(); }

BandMatrix derivative_matrix(const SpatialGrid& grid, Closure closure) {
  const std::size_t n = grid.size();
  const std::size_t b = closure_half_band(closure);
  BandMatrix d(n, b, b);
  const double h = grid.hx();
  for (std::size_t j = 1; j + 1 < n; ++j) {
    d.at(j, j - 1) = -0.5 / h;
    d.at(j, j + 1) = 0.5 / h;
  }
  const std::size_t last = n - 1;
  if (closure == Closure::kSecondOrderOneSided) {
    d.at(0, 0) = -1.5 / h;
    d.at(0, 1) = 2.0 / h;
    d.at(0, 2) = -0.5 / h;
    d.at(last, last - 2) = 0.5 / h;
    d.at(last, last - 1) = -2.0 / h;
    d.at(last, last) = 1.5 / h;
  } else {
    d.at(0, 0) = -1.0 / h;
    d.at(0, 1) = 1.0 / h;
    d.at(last, last - 1) = -1.0 / h;
    d.at(last, last) = 1.0 / h;
  }
  return d;
}

std::vector<Complex> apply_derivative(const BandMatrix& d, std::span<const Complex> u) { return d.multiply(u); }

Coefficients Coefficients::constant(const SpatialGrid& grid, double kappa0, double kappa1, double eps, Complex eta,
                                    Complex mu0, Complex mu1) {
  const std::size_t n = grid.size();
  Coefficients c;
  c.kappa0.assign(n, kappa0);
  c.kappa1.assign(n, kappa1);
  c.eps.assign(n, eps);
  c.eta.assign(n, eta);
  c.mu0.assign(n, mu0);
  c.mu1.assign(n, mu1);
  return c;
}

void Coefficients::validate(const SpatialGrid& grid) const {
  const std::size_t n = grid.size();
  require_size(kappa0.size(), n, "kappa0");
  require_size(kappa1.size(), n, "kappa1");
  require_size(eps.size(), n, "eps");
  require_size(eta.size(), n, "eta");
  require_size(mu0.size(), n, "mu0");
  require_size(mu1.size(), n, "mu1");
  if (has_memory()) {
    require_size(memory_weight.size(), n, "memory_weight");
    if (memory->dim() != 1) throw Error(ErrorKind::kInvalidArgument, kModule, "memory kernel must be scalar");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!(kappa0[j] >= 0.0) || !(kappa1[j] >= 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, kModule, "kappa0 and kappa1 must be nonnegative");
    }
    if (!(eps[j] >= 0.0)) throw Error(ErrorKind::kInvalidArgument, kModule, "eps must be nonnegative");
    const bool finite = std::isfinite(kappa0[j]) && std::isfinite(kappa1[j]) && std::isfinite(eps[j]) &&
                        std::isfinite(std::abs(eta[j])) && std::isfinite(std::abs(mu0[j])) &&
                        std::isfinite(std::abs(mu1[j]));
    if (!finite) throw Error(ErrorKind::kInvalidArgument, kModule, "coefficients must be finite");
  }
}

double Coefficients::material_margin(double nu) const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < size(); ++j) m = std::min(m, nu * eps[j] + eta[j].real());
  return m;
}

Complex Coefficients::vv_symbol(std::size_t j, Complex lamhat) const {
  if (kappa1[j] == 0.0) {
    throw Error(ErrorKind::kElimination, kModule, "kappa1 vanishes at node " + std::to_string(j));
  }
  Complex lower = mu1[j] + std::norm(mu0[j]) / kappa1[j];
  if (has_memory()) lower += memory->evaluate_scalar(1.0 / lamhat) * memory_weight[j];
  return eps[j] * lamhat + eta[j] + lower / lamhat;
}

Complex EndpointImpedance::evaluate(Complex z) const {
  Complex out = a0 + z * (a1 + z * a2);
  if (remainder && !remainder->is_zero()) out += z * z * z * remainder->evaluate_scalar(z);
  return out;
}

Complex EndpointImpedance::tail(Complex z) const {
  Complex out = a2;
  if (remainder && !remainder->is_zero()) out += z * remainder->evaluate_scalar(z);
  return out;
}

bool EndpointImpedance::is_zero() const noexcept {
  return a0 == 0.0 && a1 == 0.0 && a2 == 0.0 && !(remainder.has_value() && !remainder->is_zero());
}

bool EndpointImpedance::has_tail() const noexcept {
  return a2 != 0.0 || (remainder.has_value() && !remainder->is_zero());
}

void ImpedanceLaw::validate() const {
  for (const auto* e : {&left, &right}) {
    if (!std::isfinite(e->a0) || !std::isfinite(e->a1) || !std::isfinite(e->a2)) {
      throw Error(ErrorKind::kInvalidArgument, kModule, "impedance coefficients must be finite");
    }
    if (e->remainder) {
      if (e->remainder->dim() != 1) {
        throw Error(ErrorKind::kInvalidArgument, kModule, "impedance remainder must be scalar");
      }
      if (!e->remainder->is_causal()) {
        throw Error(ErrorKind::kInvalidArgument, kModule, "impedance remainder must be causal");
      }
      for (const Complex z : {Complex{0.3, 0.2}, Complex{0.05, -0.1}, Complex{1.0, 0.7}}) {
        const Complex lhs = std::conj(e->evaluate(z));
        const Complex rhs = e->evaluate(std::conj(z));
        if (std::abs(lhs - rhs) > 1e-12 * std::max(1.0, std::abs(lhs))) {
          throw Error(ErrorKind::kInvalidArgument, kModule, "impedance law violates a(z)* = a(z*)");
        }
      }
    }
  }
}

Complex InteriorImpedanceField::evaluate(double x, Complex z) const {
  Complex acc{};
  Complex zp{1.0, 0.0};
  for (const auto& poly : coefficients) {
    double cx = 0.0;
    for (std::size_t m = poly.size(); m-- > 0;) cx = cx * x + poly[m];
    acc += zp * cx;
    zp *= z;
  }
  return acc;
}

Complex InteriorImpedanceField::evaluate_dx(double x, Complex z) const {
  Complex acc{};
  Complex zp{1.0, 0.0};
  for (const auto& poly : coefficients) {
    double cx = 0.0;
    for (std::size_t m = poly.size(); m-- > 1;) cx = cx * x + static_cast<double>(m) * poly[m];
    acc += zp * cx;
    zp *= z;
  }
  return acc;
}

SystemSkeleton::SystemSkeleton(SpatialGrid grid, Closure closure)
    : grid_(grid), closure_(closure), d_(derivative_matrix(grid, closure)), half_band_(closure_half_band(closure)) {}

BandMatrix SystemSkeleton::assemble(const Coefficients& coeffs, const ImpedanceLaw& imp, Complex lamhat) const {
  const std::size_t n = grid_.size();
  const std::size_t band = 2 * half_band_ + 1;
  BandMatrix a(2 * n, band, band);
  const std::size_t last = n - 1;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t lo = j >= half_band_ ? j - half_band_ : 0;
    const std::size_t hi = std::min(last, j + half_band_);
    // s-row: lamhat kappa0 s_j + (D v)_j
    a.at(s_index(j), s_index(j)) = lamhat * coeffs.kappa0[j];
    for (std::size_t m = lo; m <= hi; ++m) {
      const Complex dm = d_(j, m);
      if (dm != Complex{}) a.at(s_index(j), v_index(m)) = dm;
    }
    if (j == 0 || j == last) continue;
    // v-row: (D s)_j + vv_symbol v_j
    for (std::size_t m = lo; m <= hi; ++m) {
      const Complex dm = d_(j, m);
      if (dm != Complex{}) a.at(v_index(j), s_index(m)) = dm;
    }
    a.at(v_index(j), v_index(j)) = coeffs.vv_symbol(j, lamhat);
  }
  // Impedance rows: lamhat a(e, 1/lamhat) s_e - v_e = 0.
  const Complex z = 1.0 / lamhat;
  for (const auto& [node, endpoint] : {std::pair{std::size_t{0}, &imp.left}, std::pair{last, &imp.right}}) {
    Complex ae;
    try {
      ae = endpoint->evaluate(z);
    } catch (const Error& e) {
      throw NumericalError(ErrorKind::kFunctionEvaluation, kModule,
                           std::string("impedance evaluation failed: ") + e.what(), lamhat.imag(), 0.0);
    }
    a.at(v_index(node), s_index(node)) = lamhat * ae;
    a.at(v_index(node), v_index(node)) = -1.0;
  }
  // Elimination of w needs kappa1 != 0 at the boundary nodes too.
  for (std::size_t j : {std::size_t{0}, last}) {
    if (coeffs.kappa1[j] == 0.0) {
      throw Error(ErrorKind::kElimination, kModule, "kappa1 vanishes at node " + std::to_string(j));
    }
  }
  return a;
}

std::vector<Complex> SystemSkeleton::rhs(const Coefficients& coeffs, Complex lamhat, std::span<const Complex> f1,
                                         std::span<const Complex> f2, std::span<const Complex> f3) const {
  const std::size_t n = grid_.size();
  std::vector<Complex> b(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    b[s_index(j)] = f1[j];
    if (j == 0 || j == n - 1) continue;
    b[v_index(j)] = f3[j] - coeffs.mu0[j] * f2[j] / (lamhat * coeffs.kappa1[j]);
  }
  return b;
}

std::vector<Complex> SystemSkeleton::reconstruct_w(const Coefficients& coeffs, Complex lamhat,
                                                   std::span<const Complex> f2, std::span<const Complex> v) const {
  const std::size_t n = grid_.size();
  std::vector<Complex> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (coeffs.kappa1[j] == 0.0) {
      throw Error(ErrorKind::kElimination, kModule, "kappa1 vanishes at node " + std::to_string(j));
    }
    w[j] = (f2[j] + std::conj(coeffs.mu0[j]) * v[j]) / (lamhat * coeffs.kappa1[j]);
  }
  return w;
}

BandMatrix assemble_frequency_system(const SpatialGrid& grid, const Coefficients& coeffs, const ImpedanceLaw& imp,
                                     Complex lamhat) {
  return SystemSkeleton(grid).assemble(coeffs, imp, lamhat);
}

AdmissibilityReport impedance_admissibility(const ImpedanceLaw& imp, double nu, std::span<const double> frequencies) {
  if (!(nu > 0.0)) throw Error(ErrorKind::kInvalidArgument, kModule, "admissibility requires nu > 0");
  AdmissibilityReport r;
  r.sign_right = imp.right.a0 >= 0.0;
  r.sign_left = -imp.left.a0 >= 0.0;
  r.margin_right = nu * imp.right.a0 + imp.right.a1;
  r.margin_left = -nu * imp.left.a0 - imp.left.a1;
  if (!r.sign_right) r.violations.emplace_back("sign condition +a0(+1/2) >= 0 violated at x = +1/2");
  if (!r.sign_left) r.violations.emplace_back("sign condition -a0(-1/2) >= 0 violated at x = -1/2");
  // An identically zero endpoint law is the lossless case v = 0; it passes with margin 0.
  r.dirichlet_right = imp.right.is_zero();
  r.dirichlet_left = imp.left.is_zero();
  if (!(r.margin_right > 0.0) && !r.dirichlet_right) {
    r.violations.emplace_back("margin nu a0 + a1 at x = +1/2 is not positive");
  }
  if (!(r.margin_left > 0.0) && !r.dirichlet_left) {
    r.violations.emplace_back("margin -nu a0 - a1 at x = -1/2 is not positive");
  }
  r.pass = r.violations.empty();

  if (imp.left.has_tail() || imp.right.has_tail()) {
    std::vector<double> sweep(frequencies.begin(), frequencies.end());
    if (sweep.empty()) {
      sweep.push_back(0.0);
      for (int i = 0; i <= 200; ++i) {
        const double xi = std::pow(10.0, -3.0 + 9.0 * i / 200.0);
        sweep.push_back(xi);
        sweep.push_back(-xi);
      }
    }
    double c1 = 0.0;
    for (double xi : sweep) {
      const Complex z = 1.0 / Complex{nu, xi};
      c1 = std::max({c1, std::abs(imp.left.tail(z)), std::abs(imp.right.tail(z))});
    }
    r.remainder_deduction = c1 / nu;
  }
  return r;
}

double space_time_norm(const WeightedSignal& field, const SpatialGrid& grid) {
  if (field.channels() != grid.size()) {
    throw Error(ErrorKind::kIncompatibleGrids, kModule, "field channel count does not match the spatial grid");
  }
  const auto& tg = field.grid();
  double acc = 0.0;
  for (std::size_t j = 0; j < tg.size(); ++j) {
    double slice = 0.0;
    for (std::size_t x = 0; x < grid.size(); ++x) slice += grid.weight(x) * std::norm(field(j, x));
    acc += std::exp(-2.0 * tg.nu() * tg.time(j)) * slice;
  }
  return std::sqrt(acc * tg.dt());
}

double product_rule_check(const InteriorImpedanceField& a, const WeightedSignal& s, Closure closure) {
  const SpatialGrid grid = SpatialGrid::from_nodes(s.channels());
  const BandMatrix d = derivative_matrix(grid, closure);
  const std::size_t nx = grid.size();
  const auto& tg = s.grid();

  // Spatial derivative slice by slice.
  auto dx = [&](const WeightedSignal& f) {
    WeightedSignal out(tg, nx);
    for (std::size_t j = 0; j < tg.size(); ++j) {
      const auto row = d.multiply(f.slice(j));
      std::copy(row.begin(), row.end(), out.slice(j).begin());
    }
    return out;
  };
  auto apply_field = [&](const WeightedSignal& f, bool derivative) {
    return apply_spectral(f, nx, [&](std::size_t, Complex lamhat, std::span<const Complex> in, std::span<Complex> out) {
      const Complex z = 1.0 / lamhat;
      for (std::size_t x = 0; x < nx; ++x) {
        const double xx = grid.node(x);
        out[x] = (derivative ? a.evaluate_dx(xx, z) : a.evaluate(xx, z)) * in[x];
      }
    });
  };

  const WeightedSignal lhs = dx(apply_field(s, false));
  const WeightedSignal rhs = apply_field(s, true) + apply_field(dx(s), false);
  return space_time_norm(lhs - rhs, grid);
}

DomainFields random_domain_element(const SpatialGrid& grid, const TimeGrid& tgrid, const ImpedanceLaw& imp,
                                   std::uint64_t seed, bool adjoint_domain) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  const std::size_t nx = grid.size();
  const double T = tgrid.length();

  auto random_field = [&] {
    constexpr int kBumps = 3;
    std::vector<std::vector<Complex>> amp(kBumps, std::vector<Complex>(nx));
    std::vector<double> centre(kBumps);
    std::vector<double> width(kBumps);
    for (int b = 0; b < kBumps; ++b) {
      for (auto& z : amp[b]) z = {normal(rng), normal(rng)};
      centre[b] = tgrid.t0() + T * (0.25 + 0.3 * unit(rng));
      width[b] = T * (0.02 + 0.03 * unit(rng));
    }
    return WeightedSignal::from_function(tgrid, nx, [&](double t, std::size_t x) {
      Complex acc{};
      for (int b = 0; b < kBumps; ++b) {
        const double u = (t - centre[b]) / width[b];
        acc += amp[b][x] * std::exp(-u * u);
      }
      return acc;
    });
  };

  DomainFields u{random_field(), random_field(), random_field()};

  // Boundary values of v from the boundary traces of s, frequency by frequency.
  WeightedSignal traces(tgrid, 2);
  for (std::size_t j = 0; j < tgrid.size(); ++j) {
    traces(j, 0) = u.s(j, 0);
    traces(j, 1) = u.s(j, nx - 1);
  }
  const WeightedSignal bv = apply_spectral(
      traces, 2, [&](std::size_t, Complex lamhat, std::span<const Complex> in, std::span<Complex> out) {
        const Complex z = 1.0 / lamhat;
        const Complex left = lamhat * imp.left.evaluate(z);
        const Complex right = lamhat * imp.right.evaluate(z);
        // D(A*): v = -conj(lamhat a(1/lamhat)) s, using a(z*) = a(z)*.
        out[0] = (adjoint_domain ? -std::conj(left) : left) * in[0];
        out[1] = (adjoint_domain ? -std::conj(right) : right) * in[1];
      });
  for (std::size_t j = 0; j < tgrid.size(); ++j) {
    u.v(j, 0) = bv(j, 0);
    u.v(j, nx - 1) = bv(j, 1);
  }
  return u;
}

double accretivity_pairing(const SystemSkeleton& skeleton, const DomainFields& u, double cut) {
  const auto& grid = skeleton.grid();
  const auto& tg = u.s.grid();
  const std::size_t nx = grid.size();
  const BandMatrix& d = skeleton.derivative();
  double acc = 0.0;
  for (std::size_t j = 0; j < tg.size(); ++j) {
    if (tg.time(j) > cut) break;
    const auto dv = d.multiply(u.v.slice(j));
    const auto ds = d.multiply(u.s.slice(j));
    double slice = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      slice += grid.weight(x) * (std::conj(u.s(j, x)) * dv[x] + std::conj(u.v(j, x)) * ds[x]).real();
    }
    acc += std::exp(-2.0 * tg.nu() * tg.time(j)) * slice;
  }
  return acc * tg.dt();
}

AccretivityReport accretivity_check(const SpatialGrid& grid, const Coefficients& coeffs, const ImpedanceLaw& imp,
                                    const TimeGrid& tgrid, const AccretivityOptions& options) {
  coeffs.validate(grid);
  imp.validate();
  const auto adm = impedance_admissibility(imp, tgrid.nu());
  if (!adm.pass) {
    throw Error(ErrorKind::kPrecondition, kModule,
                "accretivity check needs an admissible impedance law: " + adm.violations.front());
  }
  const SystemSkeleton skeleton(grid, Closure::kSummationByParts);
  AccretivityReport report;
  report.min_plain = std::numeric_limits<double>::infinity();
  report.min_cutoff = std::numeric_limits<double>::infinity();
  report.min_normalised = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    const DomainFields u = random_domain_element(grid, tgrid, imp, options.seed * 1000003u + trial);
    const double norm2 = std::pow(space_time_norm(u.s, grid), 2) + std::pow(space_time_norm(u.w, grid), 2) +
                         std::pow(space_time_norm(u.v, grid), 2);
    const double plain = accretivity_pairing(skeleton, u, std::numeric_limits<double>::infinity());
    report.min_plain = std::min(report.min_plain, plain);
    report.min_normalised = std::min(report.min_normalised, plain / norm2);
    ok = ok && plain >= -options.tol * norm2;
    for (double cut : options.cut_times) {
      const double p = accretivity_pairing(skeleton, u, cut);
      report.min_cutoff = std::min(report.min_cutoff, p);
      report.min_normalised = std::min(report.min_normalised, p / norm2);
      ok = ok && p >= -options.tol * norm2;
    }
  }
  if (options.cut_times.empty()) report.min_cutoff = report.min_plain;
  report.pass = ok;
  return report;
}

double adjoint_identity_residual(const SpatialGrid& grid, const ImpedanceLaw& imp, const TimeGrid& tgrid,
                                 std::uint64_t seed) {
  const SystemSkeleton skeleton(grid, Closure::kSummationByParts);
  const BandMatrix& d = skeleton.derivative();
  const std::size_t nx = grid.size();
  const DomainFields u = random_domain_element(grid, tgrid, imp, seed, false);
  const DomainFields v = random_domain_element(grid, tgrid, imp, seed + 7919, true);

  auto derive = [&](const WeightedSignal& f, double sign) {
    WeightedSignal out(tgrid, nx);
    for (std::size_t j = 0; j < tgrid.size(); ++j) {
      const auto row = d.multiply(f.slice(j));
      for (std::size_t x = 0; x < nx; ++x) out(j, x) = sign * row[x];
    }
    return out;
  };
  auto pair = [&](const WeightedSignal& f, const WeightedSignal& g) {
    Complex acc{};
    for (std::size_t j = 0; j < tgrid.size(); ++j) {
      Complex slice{};
      for (std::size_t x = 0; x < nx; ++x) slice += grid.weight(x) * std::conj(f(j, x)) * g(j, x);
      acc += std::exp(-2.0 * tgrid.nu() * tgrid.time(j)) * slice;
    }
    return acc * tgrid.dt();
  };

  // A U = (D v, 0, D s); A* V = -(D v, 0, D s).
  const WeightedSignal au_s = derive(u.v, 1.0);
  const WeightedSignal au_v = derive(u.s, 1.0);
  const WeightedSignal av_s = derive(v.v, -1.0);
  const WeightedSignal av_v = derive(v.s, -1.0);

  const Complex lhs = pair(au_s, v.s) + pair(au_v, v.v);
  const Complex rhs = pair(u.s, av_s) + pair(u.v, av_v);

  auto norm = [&](const WeightedSignal& a, const WeightedSignal& b, const WeightedSignal& c) {
    return std::sqrt(std::pow(space_time_norm(a, grid), 2) + std::pow(space_time_norm(b, grid), 2) +
                     std::pow(space_time_norm(c, grid), 2));
  };
  const WeightedSignal zero(tgrid, nx);
  const double scale = norm(au_s, zero, au_v) * norm(v.s, v.w, v.v) + norm(u.s, u.w, u.v) * norm(av_s, zero, av_v);
  return std::abs(lhs - rhs) / scale;
}

}  // namespace evocalc
