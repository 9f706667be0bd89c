#pragma once

// Green's kernels G(t,x,z) = exp(i a(t) (z-x)^2) * Gt(t,x,z) for the free
// particle, the uniform electric field lambda(t) x, the harmonic oscillator
// lambda(t) x^2 and the Poeschl-Teller well -l(l+1)/cosh^2 x, together with
// numerical audits of the structural assumptions on G.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "supershift/contour_quad.hpp"
#include "supershift/errors.hpp"
#include "supershift/ode_coeff.hpp"
#include "supershift/potential.hpp"
#include "supershift/special_fn.hpp"

namespace supershift {

struct KernelOptions {
  double t_max = 4.0;               // coefficient ODEs are solved on [0, t_max]
  double ode_tol = 1e-12;
  double sector_angle = kPi / 4.0;  // Poeschl-Teller clamps this to pi/3
  double pole_margin = 0.1;
};

namespace detail {

// Upper bound of |Q_l^m(z)| exp(-B|z|) over the plane minus pole_margin discs
// around i pi (Z + 1/2), sampled on a grid plus the disc boundaries (where the
// maximum sits). A 1% allowance covers the sampling gaps.
inline double fit_legendre_amplitude(const LegendreFactor& q, double B, double margin) {
  double best = 0.0;
  auto visit = [&](cplx z) {
    if (cosh_pole_distance(z) < margin) return;
    best = std::max(best, std::abs(q(z, margin)) * std::exp(-B * std::abs(z)));
  };
  for (double re = -10.0; re <= 10.0; re += 0.05)
    for (double im = -10.0; im <= 10.0; im += 0.05) visit({re, im});
  for (int k = -4; k <= 3; ++k)
    for (int j = 0; j < 720; ++j)
      visit(cplx(0.0, kPi * (k + 0.5)) + std::polar(margin * (1.0 + 1e-9), 2.0 * kPi * j / 720.0));
  return 1.01 * best;
}

struct FreeModel {};

struct ElectricModel {
  std::shared_ptr<const ElectricCoeffs> coeffs;
};

struct HarmonicModel {
  std::shared_ptr<const HarmonicCoeffs> coeffs;
};

struct PoschlTellerModel {
  int l = 1;
  std::vector<LegendreFactor> q;  // m = 1..l
  std::vector<double> amp;        // A_l^m
  std::vector<double> rate;       // B_l^m
};

}  // namespace detail

/// Immutable kernel bundle: a(t), Gt(t,x,z), horizons, sector data and
/// growth witnesses A0(t,x), B0(t,x).
class GreensKernel {
 public:
  GreensKernel(Potential potential, const KernelOptions& opts) : potential_(std::move(potential)) {
    pole_margin_ = opts.pole_margin;
    sector_angle_ = opts.sector_angle;
    if (!(sector_angle_ > 0.0 && sector_angle_ < kPi / 2.0))
      throw domain_error("make_kernel: sector angle must lie in (0, pi/2)");
    struct Builder {
      GreensKernel& k;
      const KernelOptions& o;
      void operator()(const Free&) {
        k.model_ = detail::FreeModel{};
        k.kernel_horizon_ = k.horizon_ = std::numeric_limits<double>::infinity();
      }
      void operator()(const Electric& e) {
        k.model_ = detail::ElectricModel{solve_electric(e.lambda, o.t_max, o.ode_tol)};
        k.kernel_horizon_ = k.horizon_ = std::numeric_limits<double>::infinity();
        k.t_limit_ = o.t_max;
      }
      void operator()(const Harmonic& h) {
        auto c = solve_harmonic(h.lambda, o.t_max, o.ode_tol);
        k.kernel_horizon_ = c->horizon();
        k.horizon_ = c->evolution_horizon();
        k.model_ = detail::HarmonicModel{std::move(c)};
        k.t_limit_ = o.t_max;
      }
      void operator()(const PoschlTeller& pt) {
        if (pt.l < 1) throw domain_error("make_kernel: Poeschl-Teller needs l >= 1");
        detail::PoschlTellerModel m;
        m.l = pt.l;
        for (int mm = 1; mm <= pt.l; ++mm) {
          m.q.emplace_back(pt.l, mm);
          m.rate.push_back(mm + 1.0);
          m.amp.push_back(detail::fit_legendre_amplitude(m.q.back(), mm + 1.0, o.pole_margin));
        }
        k.model_ = std::move(m);
        k.kernel_horizon_ = k.horizon_ = std::numeric_limits<double>::infinity();
        k.sector_angle_ = std::min(k.sector_angle_, kPi / 3.0);
      }
    };
    std::visit(Builder{*this, opts}, potential_);
  }

  const Potential& potential() const { return potential_; }
  std::string label() const { return potential_label(potential_); }

  /// Horizon for evolution: a(t) > 0 on (0, horizon()).
  double horizon() const { return horizon_; }
  /// Horizon of the kernel formula itself (first zero of alpha for the
  /// harmonic oscillator).
  double kernel_horizon() const { return kernel_horizon_; }
  /// Largest time for which coefficients were solved.
  double t_limit() const { return t_limit_; }
  double sector_angle() const { return sector_angle_; }
  double pole_margin() const { return pole_margin_; }
  bool has_poles() const { return std::holds_alternative<detail::PoschlTellerModel>(model_); }

  double V(double t, double x) const { return potential_value(potential_, t, x); }

  double a(double t) const {
    check_time(t);
    if (auto* h = std::get_if<detail::HarmonicModel>(&model_))
      return h->coeffs->beta(t) / (4.0 * h->coeffs->alpha(t));
    return 1.0 / (4.0 * t);
  }

  /// da/dt in closed form: -1/(4t^2), or (beta' alpha - beta alpha') / (4 alpha^2).
  double a_prime(double t) const {
    check_time(t);
    if (auto* h = std::get_if<detail::HarmonicModel>(&model_)) {
      const auto s = h->coeffs->state(t);
      return (s[3] * s[0] - s[2] * s[1]) / (4.0 * s[0] * s[0]);
    }
    return -0.25 / (t * t);
  }

  /// Gt(t, x, .) with the t- and x-dependent factors evaluated once.
  class Slice {
   public:
    cplx operator()(cplx z) const {
      switch (kind_) {
        case Kind::constant:
          return c0_;
        case Kind::exponential:
          return c0_ * std::exp(c1_ * z);
        case Kind::poschl_teller: {
          cplx g = c0_;
          for (std::size_t j = 0; j < terms_.size(); ++j) {
            const double m = static_cast<double>(j + 1);
            g += terms_[j] * (*q_)[j](z, margin_) * r_kernel(m * m * t_, m * (z - x_));
          }
          return g;
        }
      }
      return 0.0;
    }

   private:
    friend class GreensKernel;
    enum class Kind { constant, exponential, poschl_teller };
    Kind kind_ = Kind::constant;
    cplx c0_{}, c1_{};
    double t_ = 0.0, x_ = 0.0, margin_ = 0.1;
    std::vector<cplx> terms_;  // m(l-m)!/(2(l+m)!) Q_l^m(x)
    const std::vector<LegendreFactor>* q_ = nullptr;
  };

  /// The returned slice refers to this kernel and must not outlive it.
  Slice slice(double t, double x) const {
    check_time(t);
    const cplx i(0.0, 1.0);
    Slice s;
    s.t_ = t;
    s.x_ = x;
    s.margin_ = pole_margin_;
    if (std::holds_alternative<detail::FreeModel>(model_)) {
      s.c0_ = 0.5 / std::sqrt(i * kPi * t);
    } else if (auto* e = std::get_if<detail::ElectricModel>(&model_)) {
      const double al = e->coeffs->alpha(t);
      const double ap = e->coeffs->alpha_prime(t);
      const double be = e->coeffs->beta(t);
      s.kind_ = Slice::Kind::exponential;
      s.c0_ = std::exp(i * (be + x * t * ap)) * (0.5 / std::sqrt(i * kPi * t));
      s.c1_ = i * al;
    } else if (auto* h = std::get_if<detail::HarmonicModel>(&model_)) {
      const auto st = h->coeffs->state(t);
      const double al = st[0], ap = st[1], be = st[2];
      s.kind_ = Slice::Kind::exponential;
      s.c0_ = std::exp((be - ap) * x * x / (4.0 * i * al)) * (0.5 / std::sqrt(i * kPi * al));
      s.c1_ = 2.0 * x * (1.0 - be) / (4.0 * i * al);
    } else {
      const auto& p = std::get<detail::PoschlTellerModel>(model_);
      s.kind_ = Slice::Kind::poschl_teller;
      s.c0_ = 0.5 / std::sqrt(i * kPi * t);
      s.q_ = &p.q;
      for (int m = 1; m <= p.l; ++m)
        s.terms_.push_back(0.5 * pt_weight(p.l, m) * p.q[m - 1](cplx(x, 0.0), pole_margin_));
    }
    return s;
  }

  cplx gtilde(double t, double x, cplx z) const { return slice(t, x)(z); }

  /// Growth witness |Gt(t,x,z)| <= A0 exp(B0 |z|) from the explicit
  /// per-potential formulas.
  GrowthWitness growth(double t, double x) const {
    check_time(t);
    struct {
      double t, x, margin;
      GrowthWitness operator()(const detail::FreeModel&) const {
        return {0.5 / std::sqrt(kPi * t), 0.0};
      }
      GrowthWitness operator()(const detail::ElectricModel& e) const {
        return {0.5 / std::sqrt(kPi * t), std::abs(e.coeffs->alpha(t))};
      }
      GrowthWitness operator()(const detail::HarmonicModel& h) const {
        const double al = h.coeffs->alpha(t);
        const double be = h.coeffs->beta(t);
        return {0.5 / std::sqrt(kPi * al), std::abs(x) * std::abs(1.0 - be) / (2.0 * al)};
      }
      // |R(s, w)| <= 2 Lambda(-sqrt(s/2)) e^{|Re w|} and |Q(z)| <= amp e^{rate |z|}.
      GrowthWitness operator()(const detail::PoschlTellerModel& p) const {
        double A = 0.5 / std::sqrt(kPi * t);
        double B = 0.0;
        for (int m = 1; m <= p.l; ++m) {
          const double qx = std::abs(p.q[m - 1](cplx(x, 0.0), margin));
          const double lam = lambda_fn(cplx(-m * std::sqrt(0.5 * t), 0.0)).real();
          A += pt_weight(p.l, m) * qx * p.amp[m - 1] * lam * std::exp(m * std::abs(x));
          B = std::max(B, m + p.rate[m - 1]);
        }
        return {A, B};
      }
    } visitor{t, x, pole_margin_};
    return std::visit(visitor, model_);
  }

  /// Ray angle for a contour pivoted at x. For the Poeschl-Teller kernel the
  /// wedges swept between the real axis and x + e^{i angle} R must keep
  /// pole_margin from +-i pi/2, i.e. (pi/2) cos(angle) - |x| sin(angle) >= margin.
  double contour_angle(double pivot) const {
    if (!has_poles()) return sector_angle_;
    const double h = kPi / 2.0;
    const double R = std::hypot(h, pivot);
    const double phi = std::atan2(std::abs(pivot), h);
    const double limit = std::acos(std::min(1.0, pole_margin_ / R)) - phi;
    return std::min(sector_angle_, 0.999 * limit);
  }

  const detail::PoschlTellerModel* poschl_teller() const {
    return std::get_if<detail::PoschlTellerModel>(&model_);
  }
  const detail::HarmonicModel* harmonic() const { return std::get_if<detail::HarmonicModel>(&model_); }
  const detail::ElectricModel* electric() const { return std::get_if<detail::ElectricModel>(&model_); }

 private:
  void check_time(double t) const {
    if (!(t > 0.0)) throw domain_error("Green's kernel: t must be positive");
    if (t >= kernel_horizon_)
      throw horizon_error("Green's kernel: t beyond horizon " + std::to_string(kernel_horizon_),
                          kernel_horizon_);
    if (t > t_limit_)
      throw horizon_error("Green's kernel: t beyond solved range " + std::to_string(t_limit_),
                          t_limit_);
  }

  Potential potential_;
  std::variant<detail::FreeModel, detail::ElectricModel, detail::HarmonicModel,
               detail::PoschlTellerModel>
      model_;
  double horizon_ = std::numeric_limits<double>::infinity();
  double kernel_horizon_ = std::numeric_limits<double>::infinity();
  double t_limit_ = std::numeric_limits<double>::infinity();
  double sector_angle_ = kPi / 4.0;
  double pole_margin_ = 0.1;
};

inline std::shared_ptr<const GreensKernel> make_kernel(Potential potential,
                                                       const KernelOptions& opts = {}) {
  return std::make_shared<const GreensKernel>(std::move(potential), opts);
}

/// G(t,x,z) = exp(i a(t) (z-x)^2) Gt(t,x,z).
inline cplx greens_value(const GreensKernel& k, double t, double x, cplx z) {
  const cplx d = z - x;
  return std::exp(cplx(0.0, k.a(t)) * d * d) * k.gtilde(t, x, z);
}

/// |i G_t + G_xx - V G| / max(|G|, floor).
///
/// The Gaussian factor E = exp(i a (z-x)^2) is differentiated exactly and
/// cancels from the ratio; central differences with one Richardson step
/// (h and h/2) act on Gt only. Differencing E itself would lose about
/// eps * a |z-x|^2 / h^2 to rounding, which swamps the check for small t.
inline double pde_residual(const GreensKernel& k, double t, double x, cplx z, double h_t = 1e-4,
                           double h_x = 1e-4, double floor = 1e-300) {
  auto H = [&](double tt, double xx) { return k.gtilde(tt, xx, z); };
  const cplx h0 = H(t, x);
  const cplx d = z - x;
  const double a = k.a(t);
  const double ap = k.a_prime(t);
  const double ht = std::min({h_t, 0.25 * t});
  const double hx = std::min(h_x, 0.1 / (k.growth(t, x).B + 1.0));
  auto dt = [&](double h) { return (H(t + h, x) - H(t - h, x)) / (2.0 * h); };
  auto dx = [&](double h) { return (H(t, x + h) - H(t, x - h)) / (2.0 * h); };
  auto dxx = [&](double h) { return (H(t, x + h) - 2.0 * h0 + H(t, x - h)) / (h * h); };
  const cplx ht_ = (4.0 * dt(0.5 * ht) - dt(ht)) / 3.0;
  const cplx hx_ = (4.0 * dx(0.5 * hx) - dx(hx)) / 3.0;
  const cplx hxx = (4.0 * dxx(0.5 * hx) - dxx(hx)) / 3.0;
  const cplx i(0.0, 1.0);
  const cplx r = i * (i * ap * d * d * h0 + ht_) + (-4.0 * a * a * d * d + 2.0 * i * a) * h0 -
                 4.0 * i * a * d * hx_ + hxx - k.V(t, x) * h0;
  return std::abs(r) / std::max(std::abs(h0), floor);
}

// ---------------------------------------------------------------------------
// Assumption audit

struct AuditSpec {
  std::vector<double> ts{0.05, 0.2, 0.5};
  std::vector<double> xs{-1.5, 0.0, 0.7};
  double z_radius = 6.0;   // sector samples r e^{i theta}, r <= z_radius
  int z_radial = 13;
  double pde_threshold = 1e-4;
  double growth_slack = 1e-6;
  std::vector<double> limit_ts{1e-2, 1e-3, 1e-4};
  double limit_radius = 2.0;  // |x|, |z| <= limit_radius for the t -> 0 limit
  double limit_threshold = 5e-2;
  double fd_step = 1e-4;
};

struct AuditCheck {
  std::string name;
  double max_violation = 0.0;  // measured statistic; compared with threshold
  double threshold = 0.0;
  std::vector<double> witness_point;  // (t, x, Re z, Im z)
  bool pass = true;
  std::string note;
};

struct AuditReport {
  std::string potential;
  std::vector<AuditCheck> checks;
  bool pass = true;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["potential"] = potential;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
      nlohmann::json cj{{"name", c.name},
                        {"max_violation", c.max_violation},
                        {"threshold", c.threshold},
                        {"witness_point", c.witness_point},
                        {"pass", c.pass}};
      if (!c.note.empty()) cj["note"] = c.note;
      j["checks"].push_back(std::move(cj));
    }
    j["pass"] = pass;
    return j;
  }
};

/// Points r e^{i theta} of the double sector S_angle (theta in {0, angle/2,
/// angle, pi, pi + angle/2, pi + angle}).
inline std::vector<cplx> sector_samples(double angle, double radius, int radial) {
  std::vector<cplx> zs;
  for (double theta : {0.0, 0.5 * angle, angle, kPi, kPi + 0.5 * angle, kPi + angle})
    for (int j = 0; j < radial; ++j)
      zs.push_back(std::polar(radius * j / std::max(1, radial - 1), theta));
  return zs;
}

inline AuditReport assumption_audit(const GreensKernel& k, const AuditSpec& spec = {}) {
  AuditReport rep;
  rep.potential = k.label();
  const auto zs = sector_samples(k.sector_angle(), spec.z_radius, spec.z_radial);

  // (i) Schroedinger equation in (t, x) for fixed z.
  AuditCheck pde;
  pde.name = "pde_residual";
  pde.threshold = spec.pde_threshold;
  for (double t : spec.ts)
    for (double x : spec.xs)
      for (cplx z : zs) {
        const double r = pde_residual(k, t, x, z, spec.fd_step, spec.fd_step);
        if (r >= pde.max_violation) {
          pde.max_violation = r;
          pde.witness_point = {t, x, z.real(), z.imag()};
        }
      }
  pde.pass = pde.max_violation <= pde.threshold;

  // (ii) a(t) > 0 with a -> infinity as t -> 0, and |Gt| <= A0 exp(B0|z|).
  AuditCheck apos;
  apos.name = "a_positive_and_blows_up";
  {
    double prev = 0.0;
    bool ok = true;
    double worst = 0.0;
    const double t_hi = std::min({1.0, 0.99 * k.horizon(), k.t_limit()});
    for (int j = 0; j <= 40; ++j) {
      const double t = t_hi * std::pow(10.0, -6.0 * (1.0 - j / 40.0));
      const double a = k.a(t);
      if (!(a > 0.0) || (j > 0 && a > prev * (1.0 + 1e-9))) {
        ok = false;
        apos.witness_point = {t};
        worst = std::max(worst, j > 0 ? a - prev : -a);
      }
      prev = a;
    }
    apos.max_violation = worst;
    apos.pass = ok && k.a(t_hi * 1e-6) > 1e3;
    apos.note = "a(t) sampled on a log grid over [1e-6, 1] * t_hi, must be positive and decreasing";
  }

  AuditCheck growth;
  growth.name = "growth_bound";
  growth.threshold = 1.0 + spec.growth_slack;
  for (double t : spec.ts)
    for (double x : spec.xs) {
      const auto w = k.growth(t, x);
      for (cplx z : zs) {
        const double ratio = std::abs(k.gtilde(t, x, z)) * std::exp(-w.B * std::abs(z)) / w.A;
        if (ratio >= growth.max_violation) {
          growth.max_violation = ratio;
          growth.witness_point = {t, x, z.real(), z.imag()};
        }
      }
    }
  growth.pass = growth.max_violation <= growth.threshold;

  // (iii) Gt / sqrt(a) -> 1/sqrt(i pi) as t -> 0.
  AuditCheck limit;
  limit.name = "initial_limit";
  limit.threshold = spec.limit_threshold;
  {
    const cplx target = 1.0 / std::sqrt(cplx(0.0, kPi));
    double prev = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    for (double t : spec.limit_ts) {
      double worst = 0.0;
      std::vector<double> wp;
      for (double x : spec.xs) {
        if (std::abs(x) > spec.limit_radius) continue;
        for (cplx z : zs) {
          if (std::abs(z) > spec.limit_radius) continue;
          const double d = std::abs(k.gtilde(t, x, z) / std::sqrt(k.a(t)) - target);
          if (d >= worst) {
            worst = d;
            wp = {t, x, z.real(), z.imag()};
          }
        }
      }
      if (worst > prev && worst > 1e-13) decreasing = false;
      prev = worst;
      limit.max_violation = worst;
      limit.witness_point = wp;
    }
    limit.pass = decreasing && limit.max_violation <= limit.threshold;
    limit.note = "deviation at the smallest t; must also decrease along the t sequence";
  }

  // (iv) exponential envelopes of d/dx Gt, d2/dx2 Gt, d/dt Gt. Local
  // integrability of A1 cannot be decided by sampling: the check fits
  // A1(t,x) with B1 = B0 + 1 on |z| <= 0.75 z_radius and verifies the
  // envelope on the remaining samples.
  AuditCheck env;
  env.name = "derivative_envelope";
  env.threshold = 1.0 + spec.growth_slack;
  env.note = "sampled envelope in lieu of an L1_loc proof of A1";
  const double h = spec.fd_step;
  for (double t : spec.ts)
    for (double x : spec.xs) {
      const double B1 = k.growth(t, x).B + 1.0;
      const double ht = std::min(h, 0.25 * t);
      std::array<double, 3> amp{0.0, 0.0, 0.0};
      std::vector<std::array<double, 3>> vals;
      for (cplx z : zs) {
        const cplx g0 = k.gtilde(t, x, z);
        const cplx gxp = k.gtilde(t, x + h, z), gxm = k.gtilde(t, x - h, z);
        const cplx gtp = k.gtilde(t + ht, x, z), gtm = k.gtilde(t - ht, x, z);
        const double w = std::exp(-B1 * std::abs(z));
        vals.push_back({std::abs(gxp - gxm) / (2.0 * h) * w,
                        std::abs(gxp - 2.0 * g0 + gxm) / (h * h) * w,
                        std::abs(gtp - gtm) / (2.0 * ht) * w});
      }
      for (std::size_t j = 0; j < zs.size(); ++j)
        if (std::abs(zs[j]) <= 0.75 * spec.z_radius)
          for (int c = 0; c < 3; ++c) amp[c] = std::max(amp[c], vals[j][c]);
      for (std::size_t j = 0; j < zs.size(); ++j)
        for (int c = 0; c < 3; ++c) {
          const double ratio = amp[c] > 0.0 ? vals[j][c] / amp[c] : 0.0;
          if (ratio > env.max_violation) {
            env.max_violation = ratio;
            env.witness_point = {t, x, zs[j].real(), zs[j].imag()};
          }
        }
    }
  env.pass = env.max_violation <= env.threshold;

  rep.checks = {pde, apos, growth, limit, env};
  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  return rep;
}

}  // namespace supershift
