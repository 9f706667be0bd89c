#pragma once

// Experiment configuration: a JSON document plus inline shorthand
// ("harmonic:omega=1", "superosc:n=20,k=3") for command-line overrides.

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "supershift/greens.hpp"
#include "supershift/initial_data.hpp"
#include "supershift/potential.hpp"

namespace supershift {

/// Invalid configuration; `field` names the offending JSON path.
class config_error : public std::runtime_error {
 public:
  config_error(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct AxisSpec {
  double min = 0.0, max = 0.0;
  int count = 1;
  std::vector<double> points() const;
};

enum class ExperimentKind { evolve, supershift, verify, greens_audit };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::evolve;
  nlohmann::json potential = {{"kind", "free"}};
  nlohmann::json initial = {{"kind", "plane"}, {"k", 3.0}};
  std::optional<AxisSpec> t_axis, x_axis;
  double tol = 1e-10;
  double angle = kPi / 4.0;
  int max_panels = 20000;
  KernelOptions kernel;
  // supershift
  cplx kappa{3.0, 0.0};
  std::vector<int> ns{10, 20, 40};
  double weight_C = -1.0;
  double metric_radius = 2.0;
  // verify
  double residual_threshold = 1e-3;
  double limit_threshold = 1e-2;
  std::vector<double> limit_ts{1e-2, 1e-3, 1e-4};
  // greens-audit
  AuditSpec audit;
  // output
  std::string out_dir = "out";
  std::string stem;

  nlohmann::json to_json() const;
};

inline std::vector<double> AxisSpec::points() const {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = count == 1 ? min : min + (max - min) * i / (count - 1);
  return v;
}

inline const char* experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::evolve:
      return "evolve";
    case ExperimentKind::supershift:
      return "supershift";
    case ExperimentKind::verify:
      return "verify";
    case ExperimentKind::greens_audit:
      return "greens-audit";
  }
  return "?";
}

inline ExperimentKind parse_experiment(const std::string& s) {
  if (s == "evolve") return ExperimentKind::evolve;
  if (s == "supershift") return ExperimentKind::supershift;
  if (s == "verify") return ExperimentKind::verify;
  if (s == "greens-audit") return ExperimentKind::greens_audit;
  throw config_error("experiment", "unknown experiment '" + s + "'");
}

namespace detail {

inline double number_at(const nlohmann::json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw config_error(path + "." + key, "missing");
  if (!j.at(key).is_number()) throw config_error(path + "." + key, "must be a number");
  return j.at(key).get<double>();
}

inline double number_or(const nlohmann::json& j, const std::string& key, double fallback,
                        const std::string& path) {
  return j.contains(key) ? number_at(j, key, path) : fallback;
}

// A number or a [re, im] pair.
inline cplx complex_at(const nlohmann::json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw config_error(path, "must be a number or a [re, im] pair");
}

inline TimeProfile parse_profile(const nlohmann::json& j, const std::string& path) {
  if (j.is_number()) return TimeProfile::constant(j.get<double>());
  if (!j.is_object()) throw config_error(path, "must be a number or an object");
  if (j.contains("constant")) return TimeProfile::constant(number_at(j, "constant", path));
  if (j.contains("sinusoid")) {
    const auto& s = j.at("sinusoid");
    const std::string p = path + ".sinusoid";
    return TimeProfile::sinusoid(number_at(s, "a", p), number_at(s, "b", p),
                                 number_at(s, "omega", p));
  }
  if (j.contains("table")) {
    const auto& t = j.at("table");
    const std::string p = path + ".table";
    if (!t.contains("t") || !t.contains("value"))
      throw config_error(p, "needs arrays 't' and 'value'");
    try {
      return TimeProfile::table(t.at("t").get<std::vector<double>>(),
                                t.at("value").get<std::vector<double>>());
    } catch (const std::exception& e) {
      throw config_error(p, e.what());
    }
  }
  throw config_error(path, "expected one of constant, sinusoid, table");
}

// "name:key=value,key=value" -> (name, {key: value})
inline std::pair<std::string, std::map<std::string, std::string>> split_shorthand(
    const std::string& s) {
  const auto colon = s.find(':');
  std::pair<std::string, std::map<std::string, std::string>> out;
  out.first = s.substr(0, colon);
  if (colon == std::string::npos) return out;
  std::stringstream rest(s.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw config_error(s, "expected key=value, got '" + item + "'");
    out.second[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

inline double to_number(const std::string& v, const std::string& field) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw config_error(field, "not a number: '" + v + "'");
  }
}

}  // namespace detail

/// Builds the potential from its JSON form:
///   {"kind": "free"}
///   {"kind": "electric", "lambda": <profile>}
///   {"kind": "harmonic", "lambda": <profile>}
///   {"kind": "poschl-teller", "l": 2}
/// where <profile> is a number, {"constant": c},
/// {"sinusoid": {"a":..,"b":..,"omega":..}} or {"table": {"t": [..], "value": [..]}}.
inline Potential parse_potential(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw config_error("potential.kind", "missing");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "free") return Free{};
  if (kind == "electric" || kind == "harmonic") {
    if (!j.contains("lambda")) throw config_error("potential.lambda", "missing");
    const auto lam = detail::parse_profile(j.at("lambda"), "potential.lambda");
    if (kind == "electric") return Electric{lam};
    return Harmonic{lam};
  }
  if (kind == "poschl-teller") {
    if (!j.contains("l") || !j.at("l").is_number_integer())
      throw config_error("potential.l", "must be an integer >= 1");
    const int l = j.at("l").get<int>();
    if (l < 1) throw config_error("potential.l", "must be an integer >= 1");
    return PoschlTeller{l};
  }
  throw config_error("potential.kind", "unknown potential '" + kind + "'");
}

/// Builds the initial signal:
///   {"kind": "plane", "k": 3}            (k may be [re, im])
///   {"kind": "superosc", "n": 20, "k": 3}
///   {"kind": "combination", "terms": [{"coeff": c, "signal": {...}}, ...]}
inline HolomorphicSignal parse_initial(const nlohmann::json& j, const std::string& path = "initial") {
  if (!j.is_object() || !j.contains("kind")) throw config_error(path + ".kind", "missing");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "plane") {
    if (!j.contains("k")) throw config_error(path + ".k", "missing");
    return plane_wave(detail::complex_at(j.at("k"), path + ".k"));
  }
  if (kind == "superosc") {
    if (!j.contains("k")) throw config_error(path + ".k", "missing");
    if (!j.contains("n") || !j.at("n").is_number_integer() || j.at("n").get<int>() < 1)
      throw config_error(path + ".n", "must be an integer >= 1");
    return superosc(j.at("n").get<int>(), detail::complex_at(j.at("k"), path + ".k"));
  }
  if (kind == "combination") {
    if (!j.contains("terms") || !j.at("terms").is_array() || j.at("terms").empty())
      throw config_error(path + ".terms", "must be a nonempty array");
    std::vector<cplx> cs;
    std::vector<HolomorphicSignal> ss;
    for (std::size_t i = 0; i < j.at("terms").size(); ++i) {
      const auto& term = j.at("terms")[i];
      const std::string p = path + ".terms[" + std::to_string(i) + "]";
      if (!term.contains("coeff")) throw config_error(p + ".coeff", "missing");
      if (!term.contains("signal")) throw config_error(p + ".signal", "missing");
      cs.push_back(detail::complex_at(term.at("coeff"), p + ".coeff"));
      ss.push_back(parse_initial(term.at("signal"), p + ".signal"));
    }
    return linear_combination(std::move(cs), std::move(ss));
  }
  throw config_error(path + ".kind", "unknown initial signal '" + kind + "'");
}

/// "free", "electric:c=1", "electric:a=1,b=0.5,omega=2",
/// "harmonic:omega=1" (lambda = omega^2), "harmonic:c=-1", "poschl-teller:l=2".
inline nlohmann::json potential_shorthand(const std::string& s) {
  const auto [name, kv] = detail::split_shorthand(s);
  auto get = [&, &kv = kv](const std::string& key) {
    return detail::to_number(kv.at(key), "--potential " + key);
  };
  if (name == "free") return {{"kind", "free"}};
  if (name == "electric" || name == "harmonic") {
    nlohmann::json lam;
    if (kv.count("omega") && kv.count("a")) {
      lam = {{"sinusoid", {{"a", get("a")}, {"b", kv.count("b") ? get("b") : 0.0},
                           {"omega", get("omega")}}}};
    } else if (name == "harmonic" && kv.count("omega")) {
      lam = {{"constant", get("omega") * get("omega")}};
    } else if (kv.count("c")) {
      lam = {{"constant", get("c")}};
    } else {
      throw config_error("--potential", "'" + s + "' needs c=, omega= or a=,b=,omega=");
    }
    return {{"kind", name}, {"lambda", lam}};
  }
  if (name == "poschl-teller") {
    if (!kv.count("l")) throw config_error("--potential", "poschl-teller needs l=");
    return {{"kind", name}, {"l", static_cast<int>(get("l"))}};
  }
  throw config_error("--potential", "unknown potential '" + name + "'");
}

/// "plane:k=3", "plane:k=2,ki=0.5", "superosc:n=20,k=3".
inline nlohmann::json initial_shorthand(const std::string& s) {
  const auto [name, kv] = detail::split_shorthand(s);
  auto get = [&, &kv = kv](const std::string& key) {
    if (!kv.count(key)) throw config_error("--initial", "'" + s + "' needs " + key + "=");
    return detail::to_number(kv.at(key), "--initial " + key);
  };
  const double ki = kv.count("ki") ? get("ki") : 0.0;
  const nlohmann::json k = ki == 0.0 ? nlohmann::json(get("k")) : nlohmann::json{get("k"), ki};
  if (name == "plane") return {{"kind", "plane"}, {"k", k}};
  if (name == "superosc")
    return {{"kind", "superosc"}, {"n", static_cast<int>(get("n"))}, {"k", k}};
  throw config_error("--initial", "unknown initial signal '" + name + "'");
}

inline AxisSpec parse_axis(const nlohmann::json& j, const std::string& path) {
  AxisSpec a;
  a.min = detail::number_at(j, "min", path);
  a.max = detail::number_at(j, "max", path);
  if (!j.contains("count") || !j.at("count").is_number_integer() || j.at("count").get<int>() < 1)
    throw config_error(path + ".count", "must be an integer >= 1");
  a.count = j.at("count").get<int>();
  if (a.count > 1 && !(a.max > a.min)) throw config_error(path, "max must exceed min");
  return a;
}

/// "min:max:count"
inline AxisSpec axis_shorthand(const std::string& s, const std::string& flag) {
  AxisSpec a;
  std::stringstream ss(s);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 3) throw config_error(flag, "expected min:max:count, got '" + s + "'");
  a.min = detail::to_number(parts[0], flag);
  a.max = detail::to_number(parts[1], flag);
  a.count = static_cast<int>(detail::to_number(parts[2], flag));
  if (a.count < 1 || (a.count > 1 && !(a.max > a.min)))
    throw config_error(flag, "invalid axis '" + s + "'");
  return a;
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("<root>", "config must be a JSON object");
  ExperimentConfig c;
  if (j.contains("experiment")) c.kind = parse_experiment(j.at("experiment").get<std::string>());
  if (!j.contains("potential")) throw config_error("potential", "missing");
  c.potential = j.at("potential");
  parse_potential(c.potential);  // validate early
  if (j.contains("initial")) {
    c.initial = j.at("initial");
    parse_initial(c.initial);
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (g.contains("t")) c.t_axis = parse_axis(g.at("t"), "grid.t");
    if (g.contains("x")) c.x_axis = parse_axis(g.at("x"), "grid.x");
  }
  if (j.contains("quadrature")) {
    const auto& q = j.at("quadrature");
    c.tol = detail::number_or(q, "tol", c.tol, "quadrature");
    c.angle = detail::number_or(q, "angle", c.angle, "quadrature");
    c.max_panels = static_cast<int>(detail::number_or(q, "max_panels", c.max_panels, "quadrature"));
    if (!(c.tol > 0.0)) throw config_error("quadrature.tol", "must be positive");
    if (!(c.angle > 0.0 && c.angle < kPi / 2.0))
      throw config_error("quadrature.angle", "must lie in (0, pi/2)");
  }
  c.kernel.sector_angle = c.angle;
  if (j.contains("kernel")) {
    const auto& k = j.at("kernel");
    c.kernel.t_max = detail::number_or(k, "t_max", c.kernel.t_max, "kernel");
    c.kernel.ode_tol = detail::number_or(k, "ode_tol", c.kernel.ode_tol, "kernel");
    c.kernel.pole_margin = detail::number_or(k, "pole_margin", c.kernel.pole_margin, "kernel");
  }
  if (j.contains("supershift")) {
    const auto& s = j.at("supershift");
    if (s.contains("kappa")) c.kappa = detail::complex_at(s.at("kappa"), "supershift.kappa");
    if (s.contains("n")) c.ns = s.at("n").get<std::vector<int>>();
    c.weight_C = detail::number_or(s, "C", c.weight_C, "supershift");
    c.metric_radius = detail::number_or(s, "metric_radius", c.metric_radius, "supershift");
    for (int n : c.ns)
      if (n < 1) throw config_error("supershift.n", "entries must be >= 1");
  }
  if (j.contains("verify")) {
    const auto& v = j.at("verify");
    c.residual_threshold =
        detail::number_or(v, "residual_threshold", c.residual_threshold, "verify");
    c.limit_threshold = detail::number_or(v, "limit_threshold", c.limit_threshold, "verify");
    if (v.contains("limit_ts")) c.limit_ts = v.at("limit_ts").get<std::vector<double>>();
  }
  if (j.contains("audit")) {
    const auto& a = j.at("audit");
    if (a.contains("t")) c.audit.ts = a.at("t").get<std::vector<double>>();
    if (a.contains("x")) c.audit.xs = a.at("x").get<std::vector<double>>();
    c.audit.z_radius = detail::number_or(a, "z_radius", c.audit.z_radius, "audit");
    c.audit.pde_threshold = detail::number_or(a, "pde_threshold", c.audit.pde_threshold, "audit");
    c.audit.limit_threshold =
        detail::number_or(a, "limit_threshold", c.audit.limit_threshold, "audit");
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    if (o.contains("dir")) c.out_dir = o.at("dir").get<std::string>();
    if (o.contains("stem")) c.stem = o.at("stem").get<std::string>();
  }
  return c;
}

inline nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment_name(kind);
  j["potential"] = potential;
  j["initial"] = initial;
  nlohmann::json grid = nlohmann::json::object();
  if (t_axis) grid["t"] = {{"min", t_axis->min}, {"max", t_axis->max}, {"count", t_axis->count}};
  if (x_axis) grid["x"] = {{"min", x_axis->min}, {"max", x_axis->max}, {"count", x_axis->count}};
  j["grid"] = grid;
  j["quadrature"] = {{"tol", tol}, {"angle", angle}, {"max_panels", max_panels}};
  j["kernel"] = {{"t_max", kernel.t_max}, {"ode_tol", kernel.ode_tol},
                 {"pole_margin", kernel.pole_margin}};
  j["supershift"] = {{"kappa", {kappa.real(), kappa.imag()}},
                     {"n", ns},
                     {"C", weight_C},
                     {"metric_radius", metric_radius}};
  j["verify"] = {{"residual_threshold", residual_threshold},
                 {"limit_threshold", limit_threshold},
                 {"limit_ts", limit_ts}};
  j["audit"] = {{"t", audit.ts},
                {"x", audit.xs},
                {"z_radius", audit.z_radius},
                {"pde_threshold", audit.pde_threshold},
                {"limit_threshold", audit.limit_threshold}};
  j["output"] = {{"dir", out_dir}, {"stem", stem}};
  return j;
}

}  // namespace supershift
