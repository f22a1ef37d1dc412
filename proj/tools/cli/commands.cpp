#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"

namespace evocalc::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

class Output {
 public:
  Output(fs::path dir, const json& names) : dir_(std::move(dir)), names_(names) {}

  fs::path path(const char* key) const { return dir_ / names_.at(key).get<std::string>(); }

  void write_json(const char* key, const json& j) const {
    std::ofstream f = open(key);
    f << j.dump(2) << '\n';
  }

  std::ofstream open(const char* key) const {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    std::ofstream f(path(key));
    if (!f) throw ConfigError("outputs." + std::string(key), "cannot open " + path(key).string() + " for writing");
    return f;
  }

 private:
  fs::path dir_;
  json names_;
};

void write_fields(std::ofstream& f, const EvoFields& u, const SpatialGrid& sg, std::size_t stride) {
  f << "t,x,s_re,s_im,w_re,w_im,v_re,v_im\n";
  const TimeGrid& tg = u.s.grid();
  for (std::size_t j = 0; j < tg.size(); j += stride) {
    const std::string t = g17(tg.time(j));
    for (std::size_t x = 0; x < sg.size(); ++x) {
      f << t << ',' << g17(sg.node(x)) << ',' << g17(u.s(j, x).real()) << ',' << g17(u.s(j, x).imag()) << ','
        << g17(u.w(j, x).real()) << ',' << g17(u.w(j, x).imag()) << ',' << g17(u.v(j, x).real()) << ','
        << g17(u.v(j, x).imag()) << '\n';
    }
  }
}

json grid_json(const Scenario& sc) {
  return {{"t0", sc.tgrid.t0()},
          {"dt", sc.tgrid.dt()},
          {"n", sc.tgrid.size()},
          {"nu", sc.tgrid.nu()},
          {"nx", sc.sgrid.size()},
          {"aliasing_budget", sc.tgrid.aliasing_budget()}};
}

json diagnostics_json(const Diagnostics& d) {
  return {{"c0_material", d.c0_material},
          {"impedance_margins", {{"left", d.impedance_margins.first}, {"right", d.impedance_margins.second}}},
          {"causality_residual", d.causality_residual},
          {"causality_time", optional_number(d.causality_time)},
          {"solve_residual", d.solve_residual},
          {"max_pivot_ratio", d.max_pivot_ratio},
          {"nu_threshold", optional_number(d.nu_threshold)},
          {"energy_trace", d.energy_trace}};
}

int cmd_solve(const Scenario& sc, const Output& out) {
  const EvoProblem p = sc.problem();
  const EvoSolution sol = solve(p);
  std::ofstream f = out.open("fields");
  write_fields(f, sol.fields(), sc.sgrid, sc.time_stride);
  json d = diagnostics_json(sol.diagnostics);
  d["schema_version"] = kSchemaVersion;
  d["command"] = "solve";
  d["grid"] = grid_json(sc);
  d["causality_pass"] = sol.diagnostics.causality_residual <= sc.tol_causality;
  out.write_json("diagnostics", d);
  return kOk;
}

int cmd_check(const Scenario& sc, const Output& out, std::ostream& os) {
  sc.coeffs.validate(sc.sgrid);
  sc.imp.validate();
  const double nu = sc.tgrid.nu();
  json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = "check";
  report["grid"] = grid_json(sc);
  std::vector<std::string> violations;

  const double margin = sc.coeffs.material_margin(nu);
  const bool margin_ok = margin >= sc.tolerances.c0;
  if (!margin_ok) {
    violations.push_back("material margin nu eps + Re eta = " + g17(margin) + " is below c0 = " +
                         g17(sc.tolerances.c0) + " (material_law)");
  }
  report["material_margin"] = {{"value", margin}, {"c0", sc.tolerances.c0}, {"pass", margin_ok}};

  const AdmissibilityReport adm = impedance_admissibility(sc.imp, nu);
  for (const auto& v : adm.violations) violations.push_back("impedance admissibility: " + v + " (spatial_system)");
  report["impedance"] = {{"pass", adm.pass},
                         {"sign_left", adm.sign_left},
                         {"sign_right", adm.sign_right},
                         {"margin_left", adm.margin_left},
                         {"margin_right", adm.margin_right},
                         {"dirichlet_left", adm.dirichlet_left},
                         {"dirichlet_right", adm.dirichlet_right},
                         {"remainder_deduction", adm.remainder_deduction}};

  bool kappa1_ok = std::all_of(sc.coeffs.kappa1.begin(), sc.coeffs.kappa1.end(), [](double k) { return k > 0.0; });
  if (!kappa1_ok) violations.emplace_back("kappa1 must be positive to eliminate w (spatial_system)");
  report["kappa1_positive"] = kappa1_ok;

  const bool alias_ok = sc.tgrid.satisfies_aliasing_bound(sc.tolerances.eps_alias);
  if (!alias_ok) {
    violations.push_back("aliasing bound e^{-nu T} = " + g17(sc.tgrid.aliasing_budget()) + " exceeds eps_alias = " +
                         g17(sc.tolerances.eps_alias) + " (weighted_time)");
  }
  report["aliasing"] = {{"budget", sc.tgrid.aliasing_budget()}, {"eps_alias", sc.tolerances.eps_alias},
                        {"pass", alias_ok}};
  report["nu_threshold"] = optional_number(estimate_nu_threshold(sc.coeffs, sc.imp, sc.tolerances.c0));

  if (sc.accretivity_trials > 0 && adm.pass) {
    AccretivityOptions opt;
    opt.trials = sc.accretivity_trials;
    opt.seed = sc.seed;
    opt.tol = sc.tol_accr;
    const double t0 = sc.tgrid.t0();
    const double len = sc.tgrid.length();
    opt.cut_times = {t0 + 0.25 * len, t0 + 0.35 * len, t0 + 0.5 * len};
    const AccretivityReport acc = accretivity_check(sc.sgrid, sc.coeffs, sc.imp, sc.tgrid, opt);
    if (!acc.pass) violations.emplace_back("accretivity pairing below -tol_accr |U|^2 (spatial_system)");
    report["accretivity"] = {{"trials", opt.trials},
                             {"seed", opt.seed},
                             {"min_plain", acc.min_plain},
                             {"min_cutoff", acc.min_cutoff},
                             {"min_normalised", acc.min_normalised},
                             {"pass", acc.pass}};
  } else {
    report["accretivity"] = nullptr;
  }
  report["violations"] = violations;
  report["pass"] = violations.empty();
  out.write_json("check", report);
  os << report.dump(2) << '\n';
  return violations.empty() ? kOk : kCheckFailed;
}

int cmd_reduce(const Scenario& sc, const Output& out) {
  const ScalarSLProblem sp = reduce(sc.problem());
  {
    std::ofstream f = out.open("rqp");
    f << "x,r,q_re,q_im,p\n";
    for (std::size_t j = 0; j < sc.sgrid.size(); ++j) {
      f << g17(sc.sgrid.node(j)) << ',' << g17(sp.r[j]) << ',' << g17(sp.q[j].real()) << ',' << g17(sp.q[j].imag())
        << ',' << g17(sp.p[j]) << '\n';
    }
  }
  {
    std::ofstream f = out.open("robin");
    f << "k,xi,left_re,left_im,right_re,right_im\n";
    for (std::size_t k = 0; k < sc.tgrid.size(); k += sc.time_stride) {
      const double xi = sc.tgrid.frequency(k);
      const auto [l, r] = robin_coefficients(sp, Complex{sc.tgrid.nu(), xi});
      f << k << ',' << g17(xi) << ',' << g17(l.real()) << ',' << g17(l.imag()) << ',' << g17(r.real()) << ','
        << g17(r.imag()) << '\n';
    }
  }
  out.write_json("reduce", {{"schema_version", kSchemaVersion},
                            {"command", "reduce"},
                            {"grid", grid_json(sc)},
                            {"parabolic", sp.parabolic},
                            {"operator", sp.parabolic ? "eta lamhat + q - d p d" : "r lambda + eta lamhat + q - d p d"},
                            {"has_memory", sp.memory.has_value()}});
  return kOk;
}

int cmd_compare(const Scenario& sc, const Output& out) {
  const CompareReport r = compare_with_full(sc.problem());
  const bool pass = r.max_diff <= sc.tol_compare;
  out.write_json("compare", {{"schema_version", kSchemaVersion},
                             {"command", "compare"},
                             {"grid", grid_json(sc)},
                             {"diff_s", r.diff_s},
                             {"diff_w", r.diff_w},
                             {"diff_v", r.diff_v},
                             {"max_diff", r.max_diff},
                             {"tolerance", sc.tol_compare},
                             {"full_residual", r.full_residual},
                             {"scalar_residual", r.scalar_residual},
                             {"pass", pass}});
  return pass ? kOk : kCheckFailed;
}

int cmd_oracle(const Scenario& sc, const Output& out) {
  const EvoProblem p = sc.problem();
  const EvoSolution oracle = time_step_oracle(p);
  const EvoSolution spectral = solve(p);
  std::ofstream f = out.open("oracle_fields");
  write_fields(f, oracle.fields(), sc.sgrid, sc.time_stride);
  json d = diagnostics_json(oracle.diagnostics);
  d["schema_version"] = kSchemaVersion;
  d["command"] = "oracle";
  d["grid"] = grid_json(sc);
  d["relative_difference"] = relative_difference(oracle.fields(), spectral.fields(), sc.sgrid);
  out.write_json("oracle", d);
  return kOk;
}

void report_error(std::ostream& err, std::string_view kind, std::string_view module, std::string_view invariant,
                  std::string_view message, const json& extra = nullptr) {
  json e = {{"kind", kind}, {"module", module}, {"invariant", invariant}, {"message", message}};
  if (!extra.is_null()) e.update(extra);
  err << json{{"error", e}}.dump() << '\n';
}

// Error::what() is "module: message"; the bare message names the invariant.
std::string bare_message(const Error& e) {
  std::string what = e.what();
  const std::string prefix = e.module() + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frequency-domain solver for evolutionary equations on ]-1/2, 1/2["};
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  bool dump = false;
  Overrides ov;
  app.add_option("command", command, "solve | check | reduce | compare | oracle")
      ->check(CLI::IsMember({"solve", "check", "reduce", "compare", "oracle"}));
  app.add_option("--config", config_path, "scenario JSON file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--nu", ov.nu, "override time.nu");
  app.add_option("--nt", ov.nt, "override time.n (window length kept)");
  app.add_option("--nx", ov.nx, "override space.nx");
  app.add_option("--seed", ov.seed, "seed for randomized checks");
  app.add_flag("--dump-config", dump, "print the resolved config and exit");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (command.empty() && !dump) throw CLI::RequiredError("command");
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", "cli", "command line", e.what());
    return kUsage;
  }

  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("--config", "cannot read " + config_path);
    json input;
    try {
      input = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
    }
    const json resolved = resolve(input, ov);
    if (dump) {
      out << resolved.dump(2) << '\n';
      return kOk;
    }
    const Scenario sc = build_scenario(resolved);
    const Output output(out_dir, resolved.at("outputs"));
    if (command == "solve") return cmd_solve(sc, output);
    if (command == "check") return cmd_check(sc, output, out);
    if (command == "reduce") return cmd_reduce(sc, output);
    if (command == "compare") return cmd_compare(sc, output);
    return cmd_oracle(sc, output);
  } catch (const ConfigError& e) {
    report_error(err, to_string(e.kind()), e.module(), e.path(), e.what());
    return kUsage;
  } catch (const NumericalError& e) {
    report_error(err, to_string(e.kind()), e.module(), bare_message(e), e.what(),
                 {{"xi", e.xi()}, {"condition_estimate", e.condition_estimate()}});
    return kNumericalFailure;
  } catch (const Error& e) {
    const bool numerical = e.kind() == ErrorKind::kSingularSystem || e.kind() == ErrorKind::kFunctionEvaluation;
    report_error(err, to_string(e.kind()), e.module(), bare_message(e), e.what());
    return numerical ? kNumericalFailure : kUsage;
  } catch (const json::exception& e) {
    report_error(err, "invalid-argument", "cli", "config schema", e.what());
    return kUsage;
  }
}

}  // namespace evocalc::cli
