#pragma once

// Psi(t,x;F) = e^{i angle} \int_R G(t, x, x + y e^{i angle}) F(x + y e^{i angle}) dy
// and the numerical checks built on it.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "supershift/contour_quad.hpp"
#include "supershift/errors.hpp"
#include "supershift/greens.hpp"
#include "supershift/initial_data.hpp"
#include "supershift/special_fn.hpp"

namespace supershift {

/// Worker count: SUPERSHIFT_THREADS if set and positive, else the hardware
/// concurrency.
inline unsigned default_threads() {
  if (const char* env = std::getenv("SUPERSHIFT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
// handled by exactly one worker, so results written to slot i are
// independent of scheduling.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, const Body& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& th : pool) th.join();
}

inline GrowthWitness combined_witness(const GreensKernel& k, const HolomorphicSignal& F, double t,
                                      double x) {
  const auto g = k.growth(t, x);
  return {g.A * F.growth.A, g.B + F.growth.B, GrowthWitness::Kind::modulus};
}

inline void check_horizon(const GreensKernel& k, double t) {
  if (!(t > 0.0)) throw domain_error("wavefunction: t must be positive");
  if (t >= k.horizon())
    throw horizon_error("wavefunction: t = " + std::to_string(t) + " is beyond the horizon T = " +
                            std::to_string(k.horizon()),
                        k.horizon());
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  x.assign(m, 0.0);
  w.assign(m, 0.0);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int j = 2; j <= m; ++j) {
        const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[m - 1 - i] = z;
    w[i] = w[m - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace detail

/// Rotated-contour evaluation of Psi(t, x; F) with contour pivot x. The ray
/// angle is the kernel's sector angle, reduced for the Poeschl-Teller kernel
/// so that the swept wedge keeps the pole margin.
inline QuadratureResult wavefunction(const GreensKernel& k, const HolomorphicSignal& F, double t,
                                     double x, double tol = 1e-10, int max_panels = 20000) {
  detail::check_horizon(k, t);
  QuadraturePlan plan;
  plan.a = k.a(t);
  plan.y1 = x;
  plan.pivot = x;
  plan.angle = k.contour_angle(x);
  plan.tol = tol;
  plan.max_panels = max_panels;
  const auto g = k.slice(t, x);
  auto f = [&](cplx z) { return g(z) * F(z); };
  return rotated_integral(f, detail::combined_witness(k, F, t, x), plan);
}

/// The same Psi from the Gaussian-regularized real-line integral
/// \int exp(-eps (y - x)^2) G(t,x,y) F(y) dy.
inline QuadratureResult wavefunction_regularized(const GreensKernel& k, const HolomorphicSignal& F,
                                                 double t, double x, double eps, double tol = 1e-10) {
  detail::check_horizon(k, t);
  const auto g = k.slice(t, x);
  auto f = [&](cplx z) { return g(z) * F(z); };
  // On the real axis the kernels stay bounded in y, so only a modulus
  // witness of F contributes exponential growth to the window choice.
  const auto w = k.growth(t, x);
  const bool grows = F.growth.kind == GrowthWitness::Kind::modulus;
  GrowthWitness real_line{w.A * F.growth.A, grows ? F.growth.B : 0.0,
                          GrowthWitness::Kind::modulus};
  return epsilon_regularized_integral(f, real_line, k.a(t), x, x, eps, tol, 5'000'000, {},
                                      F.growth.B + w.B);
}

/// Proper integral of G(t,x,y) F(y) over [x - R, x + R].
inline QuadratureResult wavefunction_truncated(const GreensKernel& k, const HolomorphicSignal& F,
                                               double t, double x, double R, double tol = 1e-12) {
  detail::check_horizon(k, t);
  const auto g = k.slice(t, x);
  auto f = [&](cplx z) { return g(z) * F(z); };
  auto r = truncated_integral(
      [&](cplx y) { return f(y + x); }, F.growth, k.a(t), 0.0, R, R, tol, 5'000'000,
      F.growth.B + k.growth(t, x).B);
  return r;
}

struct WaveField {
  std::vector<double> ts, xs;
  std::vector<cplx> values;          // values[i * xs.size() + j] = Psi(ts[i], xs[j])
  std::vector<double> quad_errors;   // NaN where evaluation failed
  std::vector<std::string> failures; // "t=..,x=..: message"
  std::string potential, initial;
  double tol = 0.0;

  std::size_t index(std::size_t i, std::size_t j) const { return i * xs.size() + j; }
  cplx at(std::size_t i, std::size_t j) const { return values[index(i, j)]; }
  bool ok() const { return failures.empty(); }
};

/// Uniform grid helper: count points from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  return v;
}

/// Psi on the tensor grid ts x xs. Failures are collected per point.
inline WaveField wavefield(const GreensKernel& k, const HolomorphicSignal& F,
                           std::vector<double> ts, std::vector<double> xs, double tol = 1e-10,
                           unsigned threads = 0, int max_panels = 20000) {
  WaveField w;
  w.ts = std::move(ts);
  w.xs = std::move(xs);
  w.potential = k.label();
  w.initial = F.label;
  w.tol = tol;
  const std::size_t total = w.ts.size() * w.xs.size();
  w.values.assign(total, cplx(std::nan(""), std::nan("")));
  w.quad_errors.assign(total, std::nan(""));
  std::vector<std::string> errors(total);
  detail::parallel_for(total, threads ? threads : default_threads(), [&](std::size_t p) {
    const double t = w.ts[p / w.xs.size()], x = w.xs[p % w.xs.size()];
    try {
      const auto r = wavefunction(k, F, t, x, tol, max_panels);
      w.values[p] = r.value;
      w.quad_errors[p] = r.err_estimate;
    } catch (const std::exception& e) {
      errors[p] = "t=" + std::to_string(t) + ",x=" + std::to_string(x) + ": " + e.what();
    }
  });
  for (auto& e : errors)
    if (!e.empty()) w.failures.push_back(std::move(e));
  return w;
}

struct ResidualReport {
  double max_residual = 0.0;
  double t = 0.0, x = 0.0;       // location of the maximum
  double fd_error_estimate = 0.0;
  std::string warning;
};

/// max over interior points of |i Psi_t + Psi_xx - V Psi| / max(|Psi|, floor)
/// with central differences on the field's own (uniform) grid and
/// floor = 1e-12 max |Psi|. The FD error estimate is the Richardson difference
/// between the h and 2h stencils, (r_2h - r_h) / 3, where the grid allows it.
inline ResidualReport schrodinger_residual_field(const WaveField& f, const GreensKernel& k) {
  ResidualReport rep;
  const std::size_t nt = f.ts.size(), nx = f.xs.size();
  if (nt < 3 || nx < 3) {
    rep.warning = "grid needs at least 3 points per axis";
    return rep;
  }
  const double dt = f.ts[1] - f.ts[0], dx = f.xs[1] - f.xs[0];
  double scale = 0.0;
  for (cplx v : f.values) scale = std::max(scale, std::abs(v));
  const double floor = 1e-12 * scale;
  if (scale == 0.0) return rep;
  auto residual = [&](std::size_t i, std::size_t j, std::size_t s) {
    const cplx psi = f.at(i, j);
    const double ht = s * dt, hx = s * dx;
    const cplx pt = (f.at(i + s, j) - f.at(i - s, j)) / (2.0 * ht);
    const cplx pxx = (f.at(i, j + s) - 2.0 * psi + f.at(i, j - s)) / (hx * hx);
    const cplx r = cplx(0.0, 1.0) * pt + pxx - k.V(f.ts[i], f.xs[j]) * psi;
    return r;
  };
  for (std::size_t i = 1; i + 1 < nt; ++i)
    for (std::size_t j = 1; j + 1 < nx; ++j) {
      const double den = std::max(std::abs(f.at(i, j)), floor);
      const double r = std::abs(residual(i, j, 1)) / den;
      if (r > rep.max_residual) {
        rep.max_residual = r;
        rep.t = f.ts[i];
        rep.x = f.xs[j];
      }
      if (i >= 2 && j >= 2 && i + 2 < nt && j + 2 < nx) {
        const double est = std::abs(residual(i, j, 2) - residual(i, j, 1)) / 3.0 / den;
        rep.fd_error_estimate = std::max(rep.fd_error_estimate, est);
      }
    }
  if (rep.fd_error_estimate > rep.max_residual)
    rep.warning = "grid too coarse: finite-difference error estimate exceeds the residual";
  return rep;
}

struct InitialLimitReport {
  std::vector<double> ts;
  std::vector<double> max_error;  // max_x |Psi(t, x) - F(x)| per t
  bool decreasing = true;
  double threshold = 1e-2;
  bool pass = false;
};

inline InitialLimitReport initial_limit_check(const GreensKernel& k, const HolomorphicSignal& F,
                                              const std::vector<double>& xs,
                                              std::vector<double> ts, double threshold = 1e-2,
                                              double tol = 1e-12, unsigned threads = 0) {
  InitialLimitReport rep;
  rep.threshold = threshold;
  rep.ts = std::move(ts);
  const auto field = wavefield(k, F, rep.ts, xs, tol, threads);
  if (!field.ok()) throw convergence_error("initial_limit_check: " + field.failures.front());
  for (std::size_t i = 0; i < rep.ts.size(); ++i) {
    double m = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j)
      m = std::max(m, std::abs(field.at(i, j) - F(cplx(xs[j], 0.0))));
    if (i > 0 && m >= rep.max_error.back() && m > 10.0 * tol) rep.decreasing = false;
    rep.max_error.push_back(m);
  }
  rep.pass = rep.decreasing && rep.max_error.back() <= threshold;
  return rep;
}

struct SupershiftReport {
  std::string potential;
  cplx kappa;
  std::vector<int> ns;
  std::vector<double> distance;  // d_n = max_grid |Psi(F_n) - Psi(phi_kappa)|
  std::vector<double> metric;    // weighted sup of F_n - phi_kappa on the sample cloud
  std::vector<double> split_discrepancy;  // |direct - sum_l C_l Psi(phi_{k_l})|, NaN if skipped
  std::vector<double> ts, xs;
  double weight_C = 0.0;
  double tol = 0.0;
  bool decreasing = true;
};

struct SupershiftOptions {
  double tol = 1e-10;
  double weight_C = -1.0;            // < 0 selects 2 (1 + |kappa|)
  double metric_radius = 2.0;        // sample disk |z| <= metric_radius
  int split_check_max_n = 10;        // per-frequency cross-check for n up to this
  unsigned threads = 0;
};

/// Psi(t,x; F_n) evaluated by integrating Gt F_n along the contour, with F_n
/// summed in extended precision at each node. For n <= split_check_max_n the
/// field is also assembled as sum_l C_l Psi(t,x; phi_{k_l}) with an
/// extended-precision outer sum, and the largest discrepancy is reported.
inline SupershiftReport supershift_experiment(const GreensKernel& k,
                                              const SupershiftFamily& family,
                                              const std::vector<int>& ns, cplx kappa,
                                              const std::vector<double>& ts,
                                              const std::vector<double>& xs,
                                              const SupershiftOptions& opt = {}) {
  SupershiftReport rep;
  rep.potential = k.label();
  rep.kappa = kappa;
  rep.ns = ns;
  rep.ts = ts;
  rep.xs = xs;
  rep.tol = opt.tol;
  rep.weight_C = opt.weight_C < 0.0 ? default_metric_weight(kappa) : opt.weight_C;
  const unsigned threads = opt.threads ? opt.threads : default_threads();

  const auto phi = family.phi(kappa);
  const auto target = wavefield(k, phi, ts, xs, opt.tol, threads);
  if (!target.ok()) throw convergence_error("supershift_experiment: " + target.failures.front());
  const auto samples = disk_samples(opt.metric_radius);

  for (int n : ns) {
    const auto seq = family.sequence(n, kappa);
    HolomorphicSignal Fn{[seq](cplx z) { return seq->eval_absolute(z, 1e-16); }, seq->growth(),
                         "superosc:n=" + std::to_string(n)};
    const auto field = wavefield(k, Fn, ts, xs, opt.tol, threads);
    if (!field.ok()) throw convergence_error("supershift_experiment: " + field.failures.front());
    double d = 0.0;
    for (std::size_t p = 0; p < field.values.size(); ++p)
      d = std::max(d, std::abs(field.values[p] - target.values[p]));
    rep.distance.push_back(d);
    rep.metric.push_back(supershift_metric(Fn, phi, rep.weight_C, samples));

    double split = std::nan("");
    if (n <= opt.split_check_max_n && kappa.imag() == 0.0) {
      const auto& c = seq->coefficients();
      std::vector<WaveField> parts;
      for (int l = 0; l <= n; ++l)
        parts.push_back(wavefield(k, plane_wave(seq->frequency(l)), ts, xs, opt.tol, threads));
      split = 0.0;
      for (std::size_t p = 0; p < field.values.size(); ++p) {
        mp_real re(0), im(0);
        for (int l = 0; l <= n; ++l) {
          const cplx v = parts[l].values[p];
          re += c.re[l] * mp_real(v.real()) - c.im[l] * mp_real(v.imag());
          im += c.re[l] * mp_real(v.imag()) + c.im[l] * mp_real(v.real());
        }
        const cplx sum(re.convert_to<double>(), im.convert_to<double>());
        split = std::max(split, std::abs(sum - field.values[p]));
      }
    }
    rep.split_discrepancy.push_back(split);
  }
  for (std::size_t i = 1; i < rep.distance.size(); ++i)
    if (!(rep.distance[i] < rep.distance[i - 1])) rep.decreasing = false;
  return rep;
}

struct MoreraResult {
  cplx value;          // closed-contour integral over kappa
  double perimeter = 0.0;
  double max_abs = 0.0;  // max |Psi| over the contour nodes
  double tol = 0.0;
  bool certified = false;  // |value| <= tol * perimeter * max_abs
};

/// \oint Psi(t, x; exp(i kappa .)) d kappa around a triangle, Gauss-Legendre
/// with m nodes per edge.
inline MoreraResult analyticity_probe(const GreensKernel& k, double t, double x,
                                      const std::array<cplx, 3>& triangle, int m = 64,
                                      double tol = 1e-10, unsigned threads = 0) {
  MoreraResult r;
  r.tol = tol;
  std::vector<double> gx, gw;
  detail::gauss_legendre(m, gx, gw);
  std::vector<cplx> nodes, weights;
  for (int e = 0; e < 3; ++e) {
    const cplx a = triangle[e], b = triangle[(e + 1) % 3];
    const cplx half = 0.5 * (b - a);
    r.perimeter += std::abs(b - a);
    if (std::abs(b - a) == 0.0) continue;
    for (int j = 0; j < m; ++j) {
      nodes.push_back(a + half * (gx[j] + 1.0));
      weights.push_back(half * gw[j]);
    }
  }
  std::vector<cplx> vals(nodes.size());
  detail::parallel_for(nodes.size(), threads ? threads : default_threads(), [&](std::size_t i) {
    vals[i] = wavefunction(k, plane_wave(nodes[i]), t, x, tol).value;
  });
  detail::CompensatedSum sum;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    sum.add(weights[i] * vals[i]);
    r.max_abs = std::max(r.max_abs, std::abs(vals[i]));
  }
  r.value = sum.value();
  r.certified = std::abs(r.value) <= tol * r.perimeter * std::max(r.max_abs, 1e-300);
  return r;
}

struct ContinuityReport {
  std::vector<double> metric;          // sup-metric of F_n - F
  std::vector<double> field_distance;  // max_grid |Psi(F_n) - Psi(F)|
  std::vector<double> ratio;           // field_distance / metric
  double fitted_constant = 0.0;        // max ratio
  double spread = 1.0;                 // max ratio / min ratio
  bool pass = false;
};

/// Pairs (metric_n, field distance_n) and a fitted constant L with
/// field distance_n <= L metric_n; passes when the per-n ratios stay within
/// `max_spread` of each other.
inline ContinuityReport continuous_dependence_check(const GreensKernel& k,
                                                    const HolomorphicSignal& F,
                                                    const std::vector<HolomorphicSignal>& seq,
                                                    double C, const std::vector<cplx>& samples,
                                                    const std::vector<double>& ts,
                                                    const std::vector<double>& xs,
                                                    double tol = 1e-10, double max_spread = 3.0,
                                                    unsigned threads = 0) {
  ContinuityReport rep;
  const auto base = wavefield(k, F, ts, xs, tol, threads);
  if (!base.ok()) throw convergence_error("continuous_dependence_check: " + base.failures.front());
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool all_zero = true;
  for (const auto& Fn : seq) {
    const auto field = wavefield(k, Fn, ts, xs, tol, threads);
    if (!field.ok())
      throw convergence_error("continuous_dependence_check: " + field.failures.front());
    double d = 0.0;
    for (std::size_t p = 0; p < field.values.size(); ++p)
      d = std::max(d, std::abs(field.values[p] - base.values[p]));
    const double m = supershift_metric(Fn, F, C, samples);
    rep.metric.push_back(m);
    rep.field_distance.push_back(d);
    if (m > 0.0) {
      all_zero = false;
      const double r = d / m;
      rep.ratio.push_back(r);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    } else {
      rep.ratio.push_back(d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      if (d > 10.0 * tol) hi = std::numeric_limits<double>::infinity();
    }
  }
  if (all_zero) {
    rep.pass = hi == 0.0 || std::isfinite(hi);
    rep.spread = 1.0;
    return rep;
  }
  rep.fitted_constant = hi;
  rep.spread = hi / lo;
  rep.pass = std::isfinite(hi) && rep.spread <= max_spread;
  return rep;
}

}  // namespace supershift
