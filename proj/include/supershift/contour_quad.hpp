#pragma once

// Three representations of the Fresnel-type integral
//
//     I = \int_R exp(i a (y - y1)^2) f(y) dy
//
// for f holomorphic on a double sector: the Gaussian-regularized real-line
// limit, the truncated real-line limit, and the absolutely convergent
// rotated contour pivot + y e^{i angle}.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "supershift/errors.hpp"
#include "supershift/special_fn.hpp"

namespace supershift {

/// |f(z)| <= A exp(B|z|) (modulus bound) or |f(z)| <= A exp(B|Im z|).
struct GrowthWitness {
  enum class Kind { modulus, imag_part };
  double A = 1.0;
  double B = 0.0;
  Kind kind = Kind::modulus;
};

struct QuadraturePlan {
  double a = 1.0;                  // Gaussian rate, > 0
  double y1 = 0.0;                 // center of the quadratic phase
  double angle = kPi / 4.0;        // ray angle in (0, pi/2)
  std::optional<double> pivot;     // contour origin; defaults to y1
  std::optional<double> center;    // node clustering center along the ray
  double tol = 1e-10;              // absolute target for panel + truncation error
  int max_panels = 20000;

  double pivot_or_default() const { return pivot.value_or(y1); }
};

struct QuadratureResult {
  cplx value{};
  double err_estimate = 0.0;
  double truncation_Y = 0.0;
  int panels_used = 0;
  std::string warning;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss-Legendre rule.
inline constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  cplx value;
  double err;
  double abs_integral;
};

template <class G>
Panel gauss_kronrod_15(const G& g, double lo, double hi) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  const cplx fc = g(mid);
  cplx kron = kWgk[7] * fc;
  cplx gauss = kWg[3] * fc;
  double absk = kWgk[7] * std::abs(fc);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const cplx f1 = g(mid - dx);
    const cplx f2 = g(mid + dx);
    kron += kWgk[j] * (f1 + f2);
    absk += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  const double w = std::abs(half);
  return {kron * half, std::abs((kron - gauss) * half), absk * w};
}

// Neumaier-compensated complex accumulator.
struct CompensatedSum {
  double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;
  static void add1(double& s, double& c, double v) {
    const double t = s + v;
    if (std::abs(s) >= std::abs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }
  void add(cplx v) {
    add1(re, cre, v.real());
    add1(im, cim, v.imag());
  }
  cplx value() const { return {re + cre, im + cim}; }
};

struct AdaptiveOutcome {
  cplx value;
  double err;
  int panels;
};

inline double default_noise(double, double) { return 1.0; }

// Refines each initial panel [breaks[i], breaks[i+1]] by recursive bisection
// until its Kronrod-Gauss difference drops below its width share of tol, or
// below the rounding floor 50 eps * noise(lo, hi) * \int|g| of the panel.
template <class G, class Noise = double (*)(double, double)>
AdaptiveOutcome adaptive_panels(const G& g, const std::vector<double>& breaks, double tol,
                                int max_panels, const Noise& noise = default_noise) {
  const double total = breaks.back() - breaks.front();
  CompensatedSum sum;
  double err = 0.0;
  int panels = 0;
  constexpr double kRoundoff = 50.0 * std::numeric_limits<double>::epsilon();
  struct Item {
    double lo, hi;
    Panel p;
    int depth;
  };
  std::vector<Item> stack;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i], hi = breaks[i + 1];
    if (!(hi > lo)) continue;
    stack.push_back({lo, hi, gauss_kronrod_15(g, lo, hi), 0});
    ++panels;
    while (!stack.empty()) {
      Item it = stack.back();
      stack.pop_back();
      const double share = tol * (it.hi - it.lo) / total;
      const bool small = it.p.err <= share ||
                         it.p.err <= kRoundoff * noise(it.lo, it.hi) * it.p.abs_integral;
      if (small || it.depth >= 60) {
        sum.add(it.p.value);
        err += it.p.err;
        continue;
      }
      if (panels + 1 > max_panels)
        throw convergence_error("adaptive quadrature: panel budget " + std::to_string(max_panels) +
                                " exhausted before tol " + std::to_string(tol));
      const double mid = 0.5 * (it.lo + it.hi);
      stack.push_back({it.lo, mid, gauss_kronrod_15(g, it.lo, mid), it.depth + 1});
      stack.push_back({mid, it.hi, gauss_kronrod_15(g, mid, it.hi), it.depth + 1});
      ++panels;
    }
  }
  return {sum.value(), err, panels};
}

// log of \int_{|y|>Y} exp(-c y^2 + B|y|) dy for Y >= 0, c > 0.
inline double log_gaussian_tail(double c, double B, double Y) {
  const double sc = std::sqrt(c);
  const double xi = sc * Y - B / (2.0 * sc);
  // erfc(xi) = exp(-xi^2) Lambda(xi); keep it in log form.
  double log_erfc;
  if (xi >= 0.0)
    log_erfc = -xi * xi + std::log(lambda_fn(cplx(xi, 0.0)).real());
  else
    log_erfc = std::log(2.0 - std::exp(-xi * xi) * lambda_fn(cplx(-xi, 0.0)).real());
  return 0.5 * std::log(kPi / c) + B * B / (4.0 * c) + log_erfc;
}

// Breakpoints on [lo, hi] whose widths resolve a local phase rate
// 2a|y - y1| + extra, with at most hmax per panel.
inline std::vector<double> phase_breaks(double lo, double hi, double a, double y1, double extra,
                                        double hmax) {
  std::vector<double> b{lo};
  double y = lo;
  while (y < hi) {
    const double rate = 2.0 * a * std::abs(y - y1) + extra + 1e-300;
    const double h = std::min(hmax, 2.0 * kPi / rate);
    y = std::min(hi, y + h);
    b.push_back(y);
  }
  return b;
}

// Relative rounding noise of exp(i a (y - y1)^2) on [lo, hi]: the phase is
// only known to eps * a * max (y - y1)^2.
inline auto phase_noise(double a, double y1) {
  return [a, y1](double lo, double hi) {
    const double u = std::max(std::abs(lo - y1), std::abs(hi - y1));
    return 1.0 + a * u * u;
  };
}

}  // namespace detail

/// Smallest Y with A' * \int_{|y|>Y} exp(-a sin(2 angle) y^2 + B'|y|) dy <= tol,
/// where the contour is pivot + y e^{i angle}, A' = A exp(B|pivot|) and
/// B' = B + 2a|pivot - y1| sin(angle) for a modulus witness (for an
/// imaginary-part witness A' = A and B' = B sin(angle) + 2a|pivot - y1| sin(angle)).
inline double truncation_radius(const GrowthWitness& w, double a, double angle, double y1,
                                double tol, double pivot = 0.0) {
  if (!(a > 0.0)) throw domain_error("truncation_radius: a must be positive");
  if (!(angle > 0.0 && angle < kPi / 2.0))
    throw domain_error("truncation_radius: angle must lie in (0, pi/2)");
  if (!(tol > 0.0)) throw domain_error("truncation_radius: tol must be positive");
  const double c = a * std::sin(2.0 * angle);
  const double shift = 2.0 * a * std::abs(pivot - y1) * std::sin(angle);
  double logA, B;
  if (w.kind == GrowthWitness::Kind::modulus) {
    logA = std::log(std::max(w.A, 1e-300)) + w.B * std::abs(pivot);
    B = w.B + shift;
  } else {
    logA = std::log(std::max(w.A, 1e-300));
    B = w.B * std::sin(angle) + shift;
  }
  const double log_tol = std::log(tol);
  auto excess = [&](double Y) { return logA + detail::log_gaussian_tail(c, B, Y) - log_tol; };
  double lo = 0.0;
  if (excess(lo) <= 0.0) return 0.0;
  double hi = std::max(1.0, B / c);
  while (excess(hi) > 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

/// e^{i angle} \int_R exp(i a (pivot + y e^{i angle} - y1)^2) f(pivot + y e^{i angle}) dy.
///
/// With pivot = 0 this is the ray through the origin; the default pivot y1
/// turns the quadratic factor into a centered Gaussian exp(-a sin(2 angle) y^2)
/// times a phase. Both equal the regularized real-line limit whenever f is
/// holomorphic and exponentially bounded on the region swept between the
/// real axis and the contour.
template <class F>
QuadratureResult rotated_integral(const F& f, const GrowthWitness& witness,
                                  const QuadraturePlan& plan) {
  if (!(plan.a > 0.0)) throw domain_error("rotated_integral: a must be positive");
  if (!(plan.angle > 0.0 && plan.angle < kPi / 2.0))
    throw domain_error("rotated_integral: angle must lie in (0, pi/2)");
  if (!(plan.tol > 0.0)) throw domain_error("rotated_integral: tol must be positive");

  const double p = plan.pivot_or_default();
  const double d = p - plan.y1;
  const cplx dir = std::polar(1.0, plan.angle);
  const cplx ia(0.0, plan.a);
  auto g = [&](double y) -> cplx {
    const cplx u = d + y * dir;
    const cplx q = ia * u * u;
    if (q.real() < -745.0) return 0.0;
    return dir * std::exp(q) * f(p + y * dir);
  };

  // Split tol evenly between truncation and panel error.
  const double Y = truncation_radius(witness, plan.a, plan.angle, plan.y1, 0.5 * plan.tol, p);
  QuadratureResult out;
  out.truncation_Y = Y;
  if (Y == 0.0) return out;

  const double c = plan.a * std::sin(2.0 * plan.angle);
  const double peak = plan.center.value_or(-d / (2.0 * std::cos(plan.angle)));
  const double width = std::min(1.0, 1.0 / std::sqrt(c));
  std::vector<double> breaks{-Y};
  // Uniform panels anchored at the Gaussian peak.
  const double first = peak - width * std::floor((peak + Y) / width);
  for (double b = first; b < Y; b += width)
    if (b > -Y) breaks.push_back(b);
  breaks.push_back(Y);

  const auto r = detail::adaptive_panels(g, breaks, 0.5 * plan.tol, plan.max_panels);
  out.value = r.value;
  out.err_estimate = r.err + 0.5 * plan.tol;
  out.panels_used = r.panels;
  return out;
}

/// \int_R exp(-eps (y - y0)^2) exp(i a (y - y1)^2) f(y) dy over the window
/// outside of which the Gaussian tail bound is below tol/2. An explicit
/// window [lo, hi] may be passed instead.
template <class F>
QuadratureResult epsilon_regularized_integral(const F& f, const GrowthWitness& witness, double a,
                                              double y1, double y0, double eps, double tol,
                                              int max_panels = 5'000'000,
                                              std::optional<std::pair<double, double>> bounds = {},
                                              double phase_hint = 0.0) {
  if (!(eps > 0.0)) throw domain_error("epsilon_regularized_integral: eps must be positive");
  if (!(tol > 0.0)) throw domain_error("epsilon_regularized_integral: tol must be positive");
  double lo, hi, W;
  if (bounds) {
    lo = bounds->first;
    hi = bounds->second;
    W = 0.5 * (hi - lo);
  } else {
    // On the real line both witness kinds give |f(y)| <= A exp(B'|y|).
    const double B = witness.kind == GrowthWitness::Kind::modulus ? witness.B : 0.0;
    const double logA = std::log(std::max(witness.A, 1e-300)) + B * std::abs(y0);
    const double log_tol = std::log(0.5 * tol);
    auto excess = [&](double R) { return logA + detail::log_gaussian_tail(eps, B, R) - log_tol; };
    double l = 0.0, h = std::max(1.0, B / eps);
    while (excess(h) > 0.0) h *= 2.0;
    for (int i = 0; i < 200 && h - l > 1e-10 * h; ++i) {
      const double mid = 0.5 * (l + h);
      (excess(mid) > 0.0 ? l : h) = mid;
    }
    W = h;
    lo = y0 - W;
    hi = y0 + W;
  }
  auto g = [&](double y) -> cplx {
    const double u = y - y1;
    const double v = y - y0;
    return std::exp(cplx(-eps * v * v, a * u * u)) * f(cplx(y, 0.0));
  };
  const auto breaks = detail::phase_breaks(lo, hi, a, y1, phase_hint, 1.0);
  const auto r =
      detail::adaptive_panels(g, breaks, 0.5 * tol, max_panels, detail::phase_noise(a, y1));
  QuadratureResult out;
  out.value = r.value;
  out.err_estimate = r.err + (bounds ? 0.0 : 0.5 * tol);
  out.truncation_Y = W;
  out.panels_used = r.panels;
  return out;
}

/// Proper integral \int_{-R1}^{R2} exp(i a (y - y1)^2) f(y) dy. Its limit as
/// R1, R2 -> infinity equals the rotated integral when f has an
/// imaginary-part witness; a modulus witness is flagged in the warning.
template <class F>
QuadratureResult truncated_integral(const F& f, const GrowthWitness& witness, double a, double y1,
                                    double R1, double R2, double tol = 1e-12,
                                    int max_panels = 5'000'000, double phase_hint = 0.0) {
  if (R1 < 0.0 || R2 < 0.0) throw domain_error("truncated_integral: radii must be nonnegative");
  QuadratureResult out;
  out.truncation_Y = std::max(R1, R2);
  if (witness.kind == GrowthWitness::Kind::modulus)
    out.warning = "modulus-bound witness: the truncated limit is not guaranteed to converge";
  if (R1 + R2 == 0.0) return out;
  const cplx ia(0.0, a);
  auto g = [&](double y) -> cplx {
    const double u = y - y1;
    return std::exp(ia * (u * u)) * f(cplx(y, 0.0));
  };
  const auto breaks = detail::phase_breaks(-R1, R2, a, y1, phase_hint, 1.0);
  const auto r = detail::adaptive_panels(g, breaks, tol, max_panels, detail::phase_noise(a, y1));
  out.value = r.value;
  out.err_estimate = r.err;
  out.panels_used = r.panels;
  return out;
}

}  // namespace supershift
