#include "config.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace evocalc::cli {
namespace {

using nlohmann::json;

const char* const kCoefficientNames[] = {"kappa0", "kappa1", "eps", "eta", "mu0", "mu1"};

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

double number_or(const json& obj, const char* key, double fallback, const std::string& path) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  return number(obj.at(key), path + "." + key);
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

Complex complex_value(const json& j, const std::string& path) {
  if (j.is_number()) return number(j, path);
  if (j.is_object() && j.contains("re")) {
    return {number(j.at("re"), path + ".re"), number_or(j, "im", 0.0, path)};
  }
  throw ConfigError(path, "expected a number or {\"re\", \"im\"}");
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& path) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(path + "." + key, "unknown key");
  }
}

json resolve_coefficient(const json& entry, double fallback, const std::string& path) {
  if (entry.is_null()) return fallback;
  if (entry.is_number() || entry.is_array()) return entry;
  require_object(entry, path);
  if (entry.contains("re")) return entry;
  if (!entry.contains("profile")) throw ConfigError(path, "expected a constant, a table or a named profile");
  const std::string profile = entry.at("profile").get<std::string>();
  json out = entry;
  if (profile == "constant") {
    reject_unknown(entry, {"profile", "value"}, path);
    out["value"] = entry.value("value", json(fallback));
  } else if (profile == "linear") {
    reject_unknown(entry, {"profile", "value", "slope"}, path);
    out["value"] = entry.value("value", json(fallback));
    out["slope"] = entry.value("slope", json(0.0));
  } else if (profile == "sine") {
    reject_unknown(entry, {"profile", "value", "amplitude", "frequency"}, path);
    out["value"] = entry.value("value", json(fallback));
    out["amplitude"] = entry.value("amplitude", json(0.0));
    out["frequency"] = entry.value("frequency", json(1.0));
  } else if (profile == "gaussian") {
    reject_unknown(entry, {"profile", "value", "amplitude", "center", "width"}, path);
    out["value"] = entry.value("value", json(fallback));
    out["amplitude"] = entry.value("amplitude", json(0.0));
    out["center"] = entry.value("center", json(0.0));
    out["width"] = entry.value("width", json(0.1));
  } else {
    throw ConfigError(path + ".profile", "unknown profile '" + profile + "'");
  }
  return out;
}

std::vector<Complex> coefficient_field(const json& entry, const SpatialGrid& sg, bool real_only,
                                       const std::string& path) {
  const std::size_t nx = sg.size();
  std::vector<Complex> out(nx);
  if (entry.is_array()) {
    if (entry.size() != nx) {
      std::ostringstream msg;
      msg << "table has " << entry.size() << " entries but space.nx = " << nx;
      throw ConfigError(path, msg.str());
    }
    for (std::size_t j = 0; j < nx; ++j) out[j] = complex_value(entry[j], path + "[" + std::to_string(j) + "]");
  } else if (entry.is_object() && entry.contains("profile")) {
    const std::string profile = entry.at("profile").get<std::string>();
    const Complex value = complex_value(entry.at("value"), path + ".value");
    for (std::size_t j = 0; j < nx; ++j) {
      const double x = sg.node(j);
      Complex v = value;
      if (profile == "linear") {
        v += complex_value(entry.at("slope"), path + ".slope") * x;
      } else if (profile == "sine") {
        v += complex_value(entry.at("amplitude"), path + ".amplitude") *
             std::sin(number(entry.at("frequency"), path + ".frequency") * x);
      } else if (profile == "gaussian") {
        const double w = number(entry.at("width"), path + ".width");
        if (!(w > 0.0)) throw ConfigError(path + ".width", "must be positive");
        const double u = (x - number(entry.at("center"), path + ".center")) / w;
        v += complex_value(entry.at("amplitude"), path + ".amplitude") * std::exp(-u * u);
      }
      out[j] = v;
    }
  } else {
    const Complex v = complex_value(entry, path);
    std::fill(out.begin(), out.end(), v);
  }
  if (real_only) {
    for (const Complex& c : out) {
      if (c.imag() != 0.0) throw ConfigError(path, "must be real");
    }
  }
  return out;
}

std::vector<double> real_part(const std::vector<Complex>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
  return out;
}

json resolve_remainder(const json& entry, const std::string& path) {
  if (entry.is_null()) return nullptr;
  require_object(entry, path);
  if (entry.contains("polynomial")) {
    reject_unknown(entry, {"polynomial"}, path);
    if (!entry.at("polynomial").is_array()) throw ConfigError(path + ".polynomial", "expected an array");
    for (std::size_t i = 0; i < entry.at("polynomial").size(); ++i) {
      number(entry.at("polynomial")[i], path + ".polynomial[" + std::to_string(i) + "]");
    }
    return entry;
  }
  reject_unknown(entry, {"delay_h", "coefficient"}, path);
  const double h = number(entry.value("delay_h", json(nullptr)), path + ".delay_h");
  if (h > 0.0) throw ConfigError(path + ".delay_h", "a causal delay needs delay_h <= 0");
  return json{{"delay_h", h}, {"coefficient", number_or(entry, "coefficient", 1.0, path)}};
}

OperatorFunction remainder_function(const json& entry) {
  if (entry.contains("polynomial")) {
    std::vector<Complex> c;
    for (const auto& v : entry.at("polynomial")) c.emplace_back(v.get<double>());
    return OperatorFunction::scalar_polynomial(std::move(c));
  }
  return OperatorFunction::scalar_delay(entry.at("delay_h").get<double>(), entry.at("coefficient").get<double>());
}

json resolve_endpoint(const json& entry, const std::string& path) {
  if (entry.is_null()) return json{{"a0", 0.0}, {"a1", 0.0}, {"a2", 0.0}, {"remainder", nullptr}};
  require_object(entry, path);
  reject_unknown(entry, {"a0", "a1", "a2", "remainder"}, path);
  return json{{"a0", number_or(entry, "a0", 0.0, path)},
              {"a1", number_or(entry, "a1", 0.0, path)},
              {"a2", number_or(entry, "a2", 0.0, path)},
              {"remainder", resolve_remainder(entry.value("remainder", json(nullptr)), path + ".remainder")}};
}

EndpointImpedance endpoint(const json& entry) {
  EndpointImpedance e{entry.at("a0").get<double>(), entry.at("a1").get<double>(), entry.at("a2").get<double>(),
                      std::nullopt};
  if (!entry.at("remainder").is_null()) e.remainder = remainder_function(entry.at("remainder"));
  return e;
}

json resolve_source(const json& entry) {
  if (entry.is_null()) return json{{"channel", "none"}};
  require_object(entry, "source");
  reject_unknown(entry, {"channel", "spatial", "temporal"}, "source");
  const std::string channel = entry.value("channel", std::string("f3"));
  if (channel == "none") return json{{"channel", "none"}};
  if (channel != "f1" && channel != "f2" && channel != "f3") {
    throw ConfigError("source.channel", "expected one of f1, f2, f3, none");
  }
  json spatial = entry.value("spatial", json{{"profile", "gaussian"}});
  require_object(spatial, "source.spatial");
  const std::string sp = spatial.value("profile", std::string("gaussian"));
  if (sp == "gaussian") {
    reject_unknown(spatial, {"profile", "center", "width"}, "source.spatial");
    spatial = {{"profile", sp},
               {"center", number_or(spatial, "center", 0.0, "source.spatial")},
               {"width", number_or(spatial, "width", 0.1, "source.spatial")}};
    if (!(spatial["width"].get<double>() > 0.0)) throw ConfigError("source.spatial.width", "must be positive");
  } else if (sp == "sine") {
    reject_unknown(spatial, {"profile", "mode"}, "source.spatial");
    spatial = {{"profile", sp}, {"mode", number_or(spatial, "mode", 1.0, "source.spatial")}};
  } else if (sp == "uniform") {
    reject_unknown(spatial, {"profile"}, "source.spatial");
    spatial = {{"profile", sp}};
  } else {
    throw ConfigError("source.spatial.profile", "unknown profile '" + sp + "'");
  }
  json temporal = entry.value("temporal", json::object());
  require_object(temporal, "source.temporal");
  reject_unknown(temporal, {"profile", "onset", "width", "amplitude"}, "source.temporal");
  if (temporal.value("profile", std::string("gaussian")) != "gaussian") {
    throw ConfigError("source.temporal.profile", "only 'gaussian' is supported");
  }
  if (!temporal.contains("onset")) throw ConfigError("source.temporal.onset", "required");
  temporal = {{"profile", "gaussian"},
              {"onset", number(temporal.at("onset"), "source.temporal.onset")},
              {"width", number_or(temporal, "width", 0.1, "source.temporal")},
              {"amplitude", number_or(temporal, "amplitude", 1.0, "source.temporal")}};
  if (!(temporal["width"].get<double>() > 0.0)) throw ConfigError("source.temporal.width", "must be positive");
  return json{{"channel", channel}, {"spatial", spatial}, {"temporal", temporal}};
}

}  // namespace

json resolve(const json& input, const Overrides& ov) {
  require_object(input, "$");
  reject_unknown(input,
                 {"schema_version", "time", "space", "coefficients", "memory", "impedance", "source", "tolerances",
                  "check", "outputs", "lint"},
                 "$");
  if (input.contains("schema_version") && input.at("schema_version") != kSchemaVersion) {
    throw ConfigError("schema_version", "unsupported schema version (expected 1)");
  }
  json out;
  out["schema_version"] = kSchemaVersion;

  if (!input.contains("time")) throw ConfigError("time", "required");
  const json& t = input.at("time");
  require_object(t, "time");
  reject_unknown(t, {"t0", "dt", "length", "n", "nu"}, "time");
  if (!t.contains("n")) throw ConfigError("time.n", "required");
  std::size_t n = count(t.at("n"), "time.n");
  const double t0 = number_or(t, "t0", 0.0, "time");
  double dt = 0.0;
  if (t.contains("dt") == t.contains("length")) throw ConfigError("time", "give exactly one of dt and length");
  if (t.contains("dt")) {
    dt = number(t.at("dt"), "time.dt");
  } else {
    dt = number(t.at("length"), "time.length") / static_cast<double>(n);
  }
  if (ov.nt) {
    // The window length is kept; dt follows the new sample count.
    dt = dt * static_cast<double>(n) / static_cast<double>(*ov.nt);
    n = *ov.nt;
  }
  if (!t.contains("nu") && !ov.nu) throw ConfigError("time.nu", "required");
  const double nu = ov.nu ? *ov.nu : number(t.at("nu"), "time.nu");
  out["time"] = {{"t0", t0}, {"dt", dt}, {"n", n}, {"nu", nu}};

  if (!input.contains("space")) throw ConfigError("space", "required");
  const json& s = input.at("space");
  require_object(s, "space");
  reject_unknown(s, {"nx"}, "space");
  if (!s.contains("nx")) throw ConfigError("space.nx", "required");
  out["space"] = {{"nx", ov.nx ? *ov.nx : count(s.at("nx"), "space.nx")}};

  const json coeffs = input.value("coefficients", json::object());
  require_object(coeffs, "coefficients");
  reject_unknown(coeffs, {"kappa0", "kappa1", "eps", "eta", "mu0", "mu1"}, "coefficients");
  const double defaults[] = {1.0, 1.0, 1.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < 6; ++i) {
    const char* name = kCoefficientNames[i];
    out["coefficients"][name] = resolve_coefficient(coeffs.value(name, json(nullptr)), defaults[i],
                                                    std::string("coefficients.") + name);
  }
  out["memory"] = resolve_remainder(input.value("memory", json(nullptr)), "memory");

  const json imp = input.value("impedance", json::object());
  require_object(imp, "impedance");
  reject_unknown(imp, {"left", "right"}, "impedance");
  out["impedance"] = {{"left", resolve_endpoint(imp.value("left", json(nullptr)), "impedance.left")},
                      {"right", resolve_endpoint(imp.value("right", json(nullptr)), "impedance.right")}};

  out["source"] = resolve_source(input.value("source", json(nullptr)));

  const json tol = input.value("tolerances", json::object());
  require_object(tol, "tolerances");
  reject_unknown(tol, {"c0", "eps_alias", "tol_causality", "tol_accr", "tol_compare", "residual"}, "tolerances");
  out["tolerances"] = {{"c0", number_or(tol, "c0", 1e-10, "tolerances")},
                       {"eps_alias", number_or(tol, "eps_alias", 1e-8, "tolerances")},
                       {"tol_causality", number_or(tol, "tol_causality", 1e-7, "tolerances")},
                       {"tol_accr", number_or(tol, "tol_accr", 1e-8, "tolerances")},
                       {"tol_compare", number_or(tol, "tol_compare", 1e-8, "tolerances")},
                       {"residual", number_or(tol, "residual", 1e-10, "tolerances")}};

  const json check = input.value("check", json::object());
  require_object(check, "check");
  reject_unknown(check, {"accretivity_trials", "seed"}, "check");
  out["check"] = {
      {"accretivity_trials",
       check.contains("accretivity_trials") ? count(check.at("accretivity_trials"), "check.accretivity_trials") : 0},
      {"seed", ov.seed ? *ov.seed : (check.contains("seed") ? count(check.at("seed"), "check.seed") : 1)}};

  const json outputs = input.value("outputs", json::object());
  require_object(outputs, "outputs");
  reject_unknown(outputs,
                 {"fields", "diagnostics", "check", "rqp", "robin", "reduce", "compare", "oracle_fields", "oracle",
                  "time_stride"},
                 "outputs");
  json o = {{"fields", "fields.csv"},   {"diagnostics", "diagnostics.json"},
            {"check", "check.json"},    {"rqp", "rqp.csv"},
            {"robin", "robin.csv"},     {"reduce", "reduce.json"},
            {"compare", "compare.json"}, {"oracle_fields", "oracle_fields.csv"},
            {"oracle", "oracle.json"},  {"time_stride", 1}};
  for (const auto& [key, value] : outputs.items()) {
    if (key == "time_stride") {
      if (count(value, "outputs.time_stride") == 0) throw ConfigError("outputs.time_stride", "must be >= 1");
    } else if (!value.is_string()) {
      throw ConfigError("outputs." + key, "expected a file name");
    }
    o[key] = value;
  }
  out["outputs"] = o;

  const json lint = input.value("lint", json::object());
  require_object(lint, "lint");
  reject_unknown(lint, {"allow_source_placement"}, "lint");
  out["lint"] = {{"allow_source_placement", lint.value("allow_source_placement", false)}};
  return out;
}

Scenario build_scenario(const json& r) {
  Scenario sc;
  sc.resolved = r;
  const json& t = r.at("time");
  const std::size_t n = t.at("n").get<std::size_t>();
  const double dt = t.at("dt").get<double>();
  const double t0 = t.at("t0").get<double>();
  try {
    sc.tgrid = TimeGrid(t0, dt, n, t.at("nu").get<double>());
  } catch (const Error& e) {
    throw ConfigError("time", e.what());
  }
  const std::size_t nx = r.at("space").at("nx").get<std::size_t>();
  if (nx < 5) throw ConfigError("space.nx", "need at least 5 nodes");
  sc.sgrid = SpatialGrid::from_nodes(nx);

  const json& c = r.at("coefficients");
  auto field = [&](const char* name, bool real_only) {
    return coefficient_field(c.at(name), sc.sgrid, real_only, std::string("coefficients.") + name);
  };
  sc.coeffs.kappa0 = real_part(field("kappa0", true));
  sc.coeffs.kappa1 = real_part(field("kappa1", true));
  sc.coeffs.eps = real_part(field("eps", true));
  sc.coeffs.eta = field("eta", false);
  sc.coeffs.mu0 = field("mu0", false);
  sc.coeffs.mu1 = field("mu1", false);
  if (!r.at("memory").is_null()) {
    sc.coeffs.memory = remainder_function(r.at("memory"));
    sc.coeffs.memory_weight.assign(nx, 1.0);
  }
  sc.imp.left = endpoint(r.at("impedance").at("left"));
  sc.imp.right = endpoint(r.at("impedance").at("right"));

  const json& tol = r.at("tolerances");
  sc.tolerances.c0 = tol.at("c0").get<double>();
  sc.tolerances.eps_alias = tol.at("eps_alias").get<double>();
  sc.tolerances.residual = tol.at("residual").get<double>();
  sc.tol_causality = tol.at("tol_causality").get<double>();
  sc.tol_accr = tol.at("tol_accr").get<double>();
  sc.tol_compare = tol.at("tol_compare").get<double>();
  sc.seed = r.at("check").at("seed").get<std::uint64_t>();
  sc.accretivity_trials = r.at("check").at("accretivity_trials").get<std::size_t>();
  sc.time_stride = r.at("outputs").at("time_stride").get<std::size_t>();

  sc.source = make_source(sc.tgrid, sc.sgrid);
  const json& src = r.at("source");
  const std::string channel = src.at("channel").get<std::string>();
  if (channel == "none") return sc;

  const json& tp = src.at("temporal");
  const double onset = tp.at("onset").get<double>();
  const double width = tp.at("width").get<double>();
  const double amplitude = tp.at("amplitude").get<double>();
  const double centre = onset + 6.5 * width;
  const double length = sc.tgrid.length();
  if (!r.at("lint").at("allow_source_placement").get<bool>()) {
    if (onset < t0 + 0.1 * length) {
      throw ConfigError("source.temporal.onset", "source placement: onset must be at least 10% of the window after t0 "
                                                 "(set lint.allow_source_placement to override)");
    }
    if (centre + 6.5 * width > t0 + 0.5 * length) {
      throw ConfigError("source.temporal", "source placement: the pulse must decay before 50% of the window "
                                           "(set lint.allow_source_placement to override)");
    }
  }
  if (width < 5.0 * dt) {
    throw ConfigError("source.temporal.width", "pulse width must be at least 5 dt to be resolved");
  }

  const json& sp = src.at("spatial");
  const std::string profile = sp.at("profile").get<std::string>();
  std::vector<double> shape(nx);
  for (std::size_t j = 0; j < nx; ++j) {
    const double x = sc.sgrid.node(j);
    if (profile == "gaussian") {
      const double u = (x - sp.at("center").get<double>()) / sp.at("width").get<double>();
      shape[j] = std::exp(-u * u);
    } else if (profile == "sine") {
      shape[j] = std::sin(sp.at("mode").get<double>() * std::numbers::pi * (x + 0.5));
    } else {
      shape[j] = 1.0;
    }
  }
  const Field f = channel == "f1" ? Field::kS : channel == "f2" ? Field::kW : Field::kV;
  for (std::size_t j = 0; j < n; ++j) {
    const double u = (sc.tgrid.time(j) - centre) / width;
    double pt = std::exp(-u * u);
    if (pt < 1e-16) continue;
    pt *= amplitude;
    for (std::size_t x = 0; x < nx; ++x) sc.source(j, source_channel(f, x, nx)) = pt * shape[x];
  }
  return sc;
}

}  // namespace evocalc::cli
