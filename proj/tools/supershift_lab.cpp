// supershift-lab: evolve, supershift, verify and greens-audit experiments.
//
// Exit status: 0 success, 1 usage or configuration error, 2 verification
// failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "supershift/supershift.hpp"

namespace ss = supershift;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kVerifyFailed = 2;

struct Overrides {
  std::string config;
  std::string potential;
  std::string initial;
  std::string k;
  std::vector<int> n;
  std::string t_axis, x_axis;
  double tol = 0.0;
  std::string out;
  unsigned threads = 0;
};

json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ss::config_error("--config", "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    throw ss::config_error(path + ":" + std::to_string(line), e.what());
  }
}

ss::ExperimentConfig resolve(ss::ExperimentKind kind, const Overrides& o) {
  json j = o.config.empty() ? json::object() : load_json(o.config);
  j["experiment"] = ss::experiment_name(kind);
  if (!o.potential.empty()) j["potential"] = ss::potential_shorthand(o.potential);
  if (!o.initial.empty()) j["initial"] = ss::initial_shorthand(o.initial);
  if (!o.k.empty()) {
    const double k = ss::detail::to_number(o.k, "--k");
    j["supershift"]["kappa"] = k;
  }
  if (!o.n.empty()) j["supershift"]["n"] = o.n;
  ss::ExperimentConfig c = ss::parse_config(j);
  if (!o.t_axis.empty()) c.t_axis = ss::axis_shorthand(o.t_axis, "--t");
  if (!o.x_axis.empty()) c.x_axis = ss::axis_shorthand(o.x_axis, "--x");
  if (o.tol > 0.0) c.tol = o.tol;
  if (!o.out.empty()) c.out_dir = o.out;
  if (c.stem.empty()) c.stem = ss::experiment_name(kind);
  return c;
}

void check_grid(const ss::GreensKernel& k, const std::vector<double>& ts) {
  for (double t : ts) {
    if (!(t > 0.0)) throw ss::config_error("grid.t", "times must be positive");
    if (t >= k.horizon())
      throw ss::config_error("grid.t", "t = " + ss::io::fmt(t) + " reaches the horizon T = " +
                                           ss::io::fmt(k.horizon()));
    if (t > k.t_limit())
      throw ss::config_error("grid.t", "t = " + ss::io::fmt(t) + " exceeds kernel.t_max = " +
                                           ss::io::fmt(k.t_limit()));
  }
}

std::filesystem::path out_path(const ss::ExperimentConfig& c, const std::string& ext) {
  return std::filesystem::path(c.out_dir) / (c.stem + ext);
}

int run_evolve(const ss::ExperimentConfig& c, const ss::GreensKernel& k, unsigned threads) {
  const auto F = ss::parse_initial(c.initial);
  const auto ts = c.t_axis.value_or(ss::AxisSpec{0.1, 1.0, 10}).points();
  const auto xs = c.x_axis.value_or(ss::AxisSpec{-5.0, 5.0, 51}).points();
  check_grid(k, ts);
  const auto field = ss::wavefield(k, F, ts, xs, c.tol, threads, c.max_panels);
  ss::io::write_atomic(out_path(c, ".csv"), ss::io::wavefield_csv(field));
  ss::io::write_atomic(out_path(c, ".dat"), ss::io::wavefield_gnuplot(field));
  ss::io::write_atomic(out_path(c, ".json"), ss::io::manifest(field, c.to_json()).dump(2) + "\n");
  std::cout << "evolve: " << field.values.size() << " points, " << field.failures.size()
            << " failures -> " << out_path(c, ".csv").string() << "\n";
  for (const auto& f : field.failures) std::cerr << "  " << f << "\n";
  return field.ok() ? kOk : kVerifyFailed;
}

int run_supershift(const ss::ExperimentConfig& c, const ss::GreensKernel& k, unsigned threads) {
  const double t_hi = std::min(0.5, 0.9 * std::min(k.horizon(), k.t_limit()));
  const auto ts = c.t_axis.value_or(ss::AxisSpec{0.1, t_hi, 5}).points();
  const auto xs = c.x_axis.value_or(ss::AxisSpec{-1.0, 1.0, 11}).points();
  check_grid(k, ts);
  ss::SupershiftOptions opt;
  opt.tol = c.tol;
  opt.weight_C = c.weight_C;
  opt.metric_radius = c.metric_radius;
  opt.threads = threads;
  const auto rep = ss::supershift_experiment(k, ss::exponential_family(), c.ns, c.kappa, ts, xs, opt);
  ss::io::write_atomic(out_path(c, ".csv"), ss::io::supershift_csv(rep));
  json m;
  m["potential"] = rep.potential;
  m["kappa"] = {rep.kappa.real(), rep.kappa.imag()};
  m["n"] = rep.ns;
  m["d_n"] = rep.distance;
  m["metric"] = rep.metric;
  m["C"] = rep.weight_C;
  m["grid"] = {{"t", rep.ts}, {"x", rep.xs}};
  m["tol"] = rep.tol;
  m["decreasing"] = rep.decreasing;
  m["config"] = c.to_json();
  m["config_digest"] = ss::io::digest(c.to_json().dump());
  m["created_utc"] = ss::io::utc_timestamp();
  ss::io::write_atomic(out_path(c, ".json"), m.dump(2) + "\n");
  std::cout << ss::io::supershift_csv(rep);
  if (!rep.decreasing) std::cerr << "supershift: d_n is not strictly decreasing\n";
  return rep.decreasing ? kOk : kVerifyFailed;
}

int run_verify(const ss::ExperimentConfig& c, const ss::GreensKernel& k, unsigned threads) {
  const auto F = ss::parse_initial(c.initial);
  json checks = json::array();
  bool pass = true;
  auto record = [&](const std::string& name, double value, double threshold, json extra = {}) {
    const bool ok = value <= threshold;
    pass = pass && ok;
    json e{{"name", name}, {"value", value}, {"threshold", threshold}, {"pass", ok}};
    if (!extra.is_null()) e["detail"] = extra;
    checks.push_back(e);
    std::cout << (ok ? "PASS " : "FAIL ") << name << " = " << ss::io::fmt(value)
              << " (threshold " << ss::io::fmt(threshold) << ")\n";
  };

  // Schroedinger residual on a fine patch of the field's own grid.
  const auto ts = c.t_axis.value_or(ss::AxisSpec{0.3, 0.31, 11}).points();
  const auto xs = c.x_axis.value_or(ss::AxisSpec{-0.01, 0.01, 21}).points();
  check_grid(k, ts);
  const double tol = std::min(c.tol, 1e-12);
  const auto field = ss::wavefield(k, F, ts, xs, tol, threads, c.max_panels);
  if (!field.ok()) throw ss::convergence_error(field.failures.front());
  const auto res = ss::schrodinger_residual_field(field, k);
  record("schrodinger_residual", res.max_residual, c.residual_threshold,
         {{"t", res.t}, {"x", res.x}, {"fd_error_estimate", res.fd_error_estimate},
          {"warning", res.warning}});

  // Initial value limit.
  check_grid(k, c.limit_ts);
  const auto lim = ss::initial_limit_check(k, F, ss::linspace(-2.0, 2.0, 21), c.limit_ts,
                                           c.limit_threshold, 1e-12, threads);
  record("initial_limit", lim.decreasing ? lim.max_error.back() : INFINITY, c.limit_threshold,
         {{"t", lim.ts}, {"max_error", lim.max_error}, {"decreasing", lim.decreasing}});

  // Closed form for plane waves under the free particle.
  if (std::holds_alternative<ss::Free>(k.potential()) && c.initial.at("kind") == "plane") {
    const ss::cplx kappa = ss::detail::complex_at(c.initial.at("k"), "initial.k");
    double err = 0.0;
    for (std::size_t i = 0; i < field.ts.size(); ++i)
      for (std::size_t j = 0; j < field.xs.size(); ++j) {
        const ss::cplx exact = std::exp(ss::cplx(0.0, 1.0) * (kappa * field.xs[j] - kappa * kappa * field.ts[i]));
        err = std::max(err, std::abs(field.at(i, j) - exact));
      }
    record("free_closed_form", err, 1e-8);
  }

  json rep{{"potential", k.label()}, {"initial", F.label}, {"checks", checks}, {"pass", pass},
           {"config", c.to_json()}, {"created_utc", ss::io::utc_timestamp()}};
  ss::io::write_atomic(out_path(c, ".json"), rep.dump(2) + "\n");
  return pass ? kOk : kVerifyFailed;
}

int run_audit(const ss::ExperimentConfig& c, const ss::GreensKernel& k) {
  const auto rep = ss::assumption_audit(k, c.audit);
  json j = rep.to_json();
  j["config"] = c.to_json();
  j["created_utc"] = ss::io::utc_timestamp();
  ss::io::write_atomic(out_path(c, ".json"), j.dump(2) + "\n");
  for (const auto& chk : rep.checks)
    std::cout << (chk.pass ? "PASS " : "FAIL ") << chk.name << " = "
              << ss::io::fmt(chk.max_violation) << "\n";
  return rep.pass ? kOk : kVerifyFailed;
}

int run(ss::ExperimentKind kind, const Overrides& o) {
  try {
    const auto c = resolve(kind, o);
    const unsigned threads = o.threads ? o.threads : ss::default_threads();
    const auto kernel = ss::make_kernel(ss::parse_potential(c.potential), c.kernel);
    switch (kind) {
      case ss::ExperimentKind::evolve:
        return run_evolve(c, *kernel, threads);
      case ss::ExperimentKind::supershift:
        return run_supershift(c, *kernel, threads);
      case ss::ExperimentKind::verify:
        return run_verify(c, *kernel, threads);
      case ss::ExperimentKind::greens_audit:
        return run_audit(c, *kernel);
    }
  } catch (const ss::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ss::horizon_error& e) {
    std::cerr << "horizon: " << e.what() << " (T = " << ss::io::fmt(e.horizon()) << ")\n";
    return kConfigError;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerifyFailed;
  }
  return kConfigError;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON experiment config");
  cmd->add_option("--potential", o.potential,
                  "free | electric:c=.. | harmonic:omega=.. | poschl-teller:l=..");
  cmd->add_option("--initial", o.initial, "plane:k=.. | superosc:n=..,k=..");
  cmd->add_option("--t", o.t_axis, "time axis min:max:count");
  cmd->add_option("--x", o.x_axis, "space axis min:max:count");
  cmd->add_option("--tol", o.tol, "absolute quadrature tolerance");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--threads", o.threads, "worker threads (default SUPERSHIFT_THREADS)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schroedinger evolution of superoscillating and supershift initial data"};
  app.require_subcommand(1);
  Overrides o;
  auto* evolve = app.add_subcommand("evolve", "evaluate Psi on a (t, x) grid");
  auto* shift = app.add_subcommand("supershift", "d_n = max |Psi(F_n) - Psi(phi_k)| over n");
  auto* verify = app.add_subcommand("verify", "PDE residual, initial limit and oracle checks");
  auto* audit = app.add_subcommand("greens-audit", "sampled audit of the kernel assumptions");
  for (auto* cmd : {evolve, shift, verify, audit}) add_common(cmd, o);
  shift->add_option("--k", o.k, "target frequency kappa");
  shift->add_option("--n", o.n, "sequence indices, e.g. 10,20,40")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  if (*evolve) return run(ss::ExperimentKind::evolve, o);
  if (*shift) return run(ss::ExperimentKind::supershift, o);
  if (*verify) return run(ss::ExperimentKind::verify, o);
  return run(ss::ExperimentKind::greens_audit, o);
}
