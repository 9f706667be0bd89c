#pragma once

// Complex special functions behind the Green's kernels: the Faddeeva
// function w, complex erf, the scaled complementary error function
// Lambda(z) = exp(z^2) erfc(z), the Poeschl-Teller auxiliary R(t,z) and the
// associated Legendre factors Q_l^m(z) = P_l^m(tanh z).

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "supershift/errors.hpp"

namespace supershift {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrtPi = 1.7724538509055160273;
inline constexpr double kTwoOverSqrtPi = 1.1283791670955125739;
// Largest argument of exp() that stays finite in double.
inline constexpr double kMaxExpArg = 709.78;

/// Principal square root of i*t for t > 0, i.e. sqrt(t) * exp(i*pi/4).
inline cplx sqrt_it(double t) {
  const double s = std::sqrt(0.5 * t);
  return {s, s};
}

namespace detail {

// Faddeeva function for x >= 0, y >= 0. Three regions on the ellipse
// q = (x/6.3)^2 + (y/4.4)^2: a power series of erf for q < 0.085264, the
// Laplace continued fraction for q > 1, and in between a Taylor expansion
// about z + ih whose derivatives come from the same continued fraction.
// Term counts are taken with a safety margin over the classical choice.
inline cplx faddeeva_first_quadrant(double x, double y) {
  const double qx = x / 6.3;
  const double qy = y / 4.4;
  double q = qx * qx + qy * qy;
  const double xquad = x * x - y * y;
  const double yquad = 2.0 * x * y;

  if (q < 0.085264) {
    const double rho = (1.0 - 0.85 * qy) * std::sqrt(q);
    const int n = static_cast<int>(std::lround(6.0 + 72.0 * rho)) + 4;
    int j = 2 * n + 1;
    double xsum = 1.0 / j;
    double ysum = 0.0;
    for (int i = n; i >= 1; --i) {
      j -= 2;
      const double xaux = (xsum * xquad - ysum * yquad) / i;
      ysum = (xsum * yquad + ysum * xquad) / i;
      xsum = xaux + 1.0 / j;
    }
    const double u1 = -kTwoOverSqrtPi * (xsum * y + ysum * x) + 1.0;
    const double v1 = kTwoOverSqrtPi * (xsum * x - ysum * y);
    const double daux = std::exp(-xquad);
    const double u2 = daux * std::cos(yquad);
    const double v2 = -daux * std::sin(yquad);
    return {u1 * u2 - v1 * v2, u1 * v2 + v1 * u2};
  }

  double h = 0.0;
  double h2 = 0.0;
  int kapn = 0;
  int nu = 0;
  if (q > 1.0) {
    q = std::sqrt(q);
    nu = static_cast<int>(3.0 + 1442.0 / (26.0 * q + 77.0)) + 8;
  } else {
    const double rho = (1.0 - qy) * std::sqrt(1.0 - q);
    h = 1.88 * rho;
    h2 = 2.0 * h;
    kapn = static_cast<int>(std::lround(7.0 + 34.0 * rho));
    nu = static_cast<int>(std::lround(16.0 + 26.0 * rho)) + 8;
  }
  const bool taylor = h > 0.0;
  double qlambda = taylor ? std::pow(h2, kapn) : 0.0;
  double rx = 0.0, ry = 0.0, sx = 0.0, sy = 0.0;
  for (int n = nu; n >= 0; --n) {
    const double np1 = n + 1.0;
    double tx = y + h + np1 * rx;
    const double ty = x - np1 * ry;
    const double c = 0.5 / (tx * tx + ty * ty);
    rx = c * tx;
    ry = c * ty;
    if (taylor && n <= kapn) {
      tx = qlambda + sx;
      sx = rx * tx - ry * sy;
      sy = ry * tx + rx * sy;
      qlambda /= h2;
    }
  }
  double u = taylor ? kTwoOverSqrtPi * sx : kTwoOverSqrtPi * rx;
  const double v = taylor ? kTwoOverSqrtPi * sy : kTwoOverSqrtPi * ry;
  if (y == 0.0) u = std::exp(-x * x);
  return {u, v};
}

inline void check_exp(double re, const char* who) {
  if (re > kMaxExpArg)
    throw overflow_error(std::string(who) + ": exp argument " + std::to_string(re) +
                         " exceeds double range");
}

}  // namespace detail

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
///
/// Lower half-plane values use w(z) = 2 exp(-z^2) - w(-z) and throw
/// overflow_error once exp(-z^2) leaves the double range.
inline cplx faddeeva_w(cplx z) {
  const double x = z.real();
  const double y = z.imag();
  if (y >= 0.0) {
    const cplx w = detail::faddeeva_first_quadrant(std::abs(x), y);
    return x < 0.0 ? std::conj(w) : w;
  }
  const cplx mz = -z;
  const cplx wm = faddeeva_w(mz);
  const cplx e = -z * z;
  detail::check_exp(e.real(), "faddeeva_w");
  return 2.0 * std::exp(e) - wm;
}

/// Scaled complementary error function Lambda(z) = exp(z^2) (1 - erf(z)).
inline cplx lambda_fn(cplx z) {
  if (z.real() >= 0.0) return faddeeva_w(cplx(-z.imag(), z.real()));
  // Reflection Lambda(z) = 2 exp(z^2) - Lambda(-z).
  const cplx e = z * z;
  detail::check_exp(e.real(), "lambda_fn");
  return 2.0 * std::exp(e) - lambda_fn(-z);
}

/// Complex error function.
inline cplx erf_complex(cplx z) {
  if (std::norm(z) < 4.0) {
    // Maclaurin series; terms peak near exp(|z|^2) < 55.
    const cplx z2 = z * z;
    cplx term = z;
    cplx sum = z;
    for (int n = 1; n < 200; ++n) {
      term *= -z2 / static_cast<double>(n);
      const cplx add = term / static_cast<double>(2 * n + 1);
      sum += add;
      if (std::abs(add) <= 1e-17 * std::abs(sum)) break;
    }
    return kTwoOverSqrtPi * sum;
  }
  if (z.real() < 0.0) return -erf_complex(-z);
  const cplx e = -z * z;
  detail::check_exp(e.real(), "erf_complex");
  return 1.0 - std::exp(e) * faddeeva_w(cplx(-z.imag(), z.real()));
}

namespace detail {

// Defining two-term expression without the symmetry fold.
inline cplx r_kernel_raw(double t, cplx z) {
  const cplx s = sqrt_it(t);
  const cplx u = z / (2.0 * s);
  return std::exp(z) * lambda_fn(u - s) - std::exp(-z) * lambda_fn(u + s);
}

}  // namespace detail

/// Poeschl-Teller auxiliary
/// R(t,z) = e^z Lambda(z/(2 sqrt(it)) - sqrt(it)) - e^{-z} Lambda(z/(2 sqrt(it)) + sqrt(it)).
///
/// Evaluated on the half-plane Re(z/sqrt(it)) >= 0 through R(t,-z) = R(t,z), so
/// both Lambda arguments have real part >= -sqrt(t/2) and no exp(w^2) blowup
/// is formed.
inline cplx r_kernel(double t, cplx z) {
  if (!(t > 0.0)) throw domain_error("r_kernel: t must be positive");
  const cplx s = sqrt_it(t);
  // Re(z / s) has the sign of Re(z * conj(s)).
  if ((z * std::conj(s)).real() < 0.0) z = -z;
  return detail::r_kernel_raw(t, z);
}

struct RKernelDerivatives {
  cplx dz;
  cplx dt;
};

/// Closed-form partial derivatives of R(t,z) in z and t.
inline RKernelDerivatives r_kernel_derivatives(double t, cplx z) {
  const cplx r = r_kernel(t, z);
  const cplx root = std::sqrt(cplx(0.0, kPi * t));  // sqrt(i pi t)
  const cplx i(0.0, 1.0);
  const cplx sh = std::sinh(z);
  const cplx ch = std::cosh(z);
  const cplx dz = z * r / (2.0 * i * t) - 2.0 * sh / root;
  const cplx dt = i * (1.0 + z * z / (4.0 * t * t)) * r + z * sh / (t * root) + 2.0 * i * ch / root;
  return {dz, dt};
}

/// Coefficients (ascending powers) of the Legendre polynomial P_l.
inline std::vector<double> legendre_coefficients(int l) {
  std::vector<double> prev{1.0};
  if (l == 0) return prev;
  std::vector<double> cur{0.0, 1.0};
  for (int n = 1; n < l; ++n) {
    // (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}
    std::vector<double> next(n + 2, 0.0);
    for (int k = 0; k <= n; ++k) next[k + 1] += (2.0 * n + 1.0) * cur[k];
    for (int k = 0; k < n; ++k) next[k] -= n * prev[k];
    for (auto& c : next) c /= (n + 1.0);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

/// Distance from z to the nearest zero of cosh, i.e. to i*pi*(k + 1/2).
inline double cosh_pole_distance(cplx z) {
  const double k = std::round(z.imag() / kPi - 0.5);
  return std::abs(z - cplx(0.0, kPi * (k + 0.5)));
}

/// Stable (sech z, tanh z) for complex z, valid for large |Re z|.
inline std::pair<cplx, cplx> sech_tanh(cplx z) {
  const bool flip = z.real() < 0.0;
  const cplx w = flip ? -z : z;
  const cplx e = std::exp(-2.0 * w);
  const cplx den = 1.0 + e;
  cplx sech = 2.0 * std::exp(-w) / den;
  cplx tanh = (1.0 - e) / den;
  if (flip) tanh = -tanh;  // sech is even
  return {sech, tanh};
}

/// Q_l^m(z) = P_l^m(tanh z) with the Condon-Shortley phase, in the form
/// (-1)^m sech^m(z) * (d^m P_l)(tanh z).
///
/// Throws domain_error if z is closer than pole_margin to i*pi*(Z + 1/2).
class LegendreFactor {
 public:
  LegendreFactor(int l, int m) : l_(l), m_(m) {
    if (l < 1 || m < 1 || m > l)
      throw domain_error("LegendreFactor: need 1 <= m <= l, got l=" + std::to_string(l) +
                         " m=" + std::to_string(m));
    std::vector<double> c = legendre_coefficients(l);
    for (int d = 0; d < m; ++d) {
      std::vector<double> dc(c.size() - 1);
      for (std::size_t k = 1; k < c.size(); ++k) dc[k - 1] = static_cast<double>(k) * c[k];
      c = std::move(dc);
    }
    poly_ = std::move(c);
    sign_ = (m % 2 == 0) ? 1.0 : -1.0;
  }

  int l() const { return l_; }
  int m() const { return m_; }

  cplx operator()(cplx z, double pole_margin = 0.1) const {
    if (cosh_pole_distance(z) < pole_margin)
      throw domain_error("q_lm: z within pole margin of i*pi*(k+1/2)");
    const auto [sech, tanh] = sech_tanh(z);
    cplx p = 0.0;
    for (auto it = poly_.rbegin(); it != poly_.rend(); ++it) p = p * tanh + *it;
    return sign_ * std::pow(sech, m_) * p;
  }

 private:
  int l_;
  int m_;
  std::vector<double> poly_;
  double sign_;
};

inline cplx q_lm(int l, int m, cplx z, double pole_margin = 0.1) {
  return LegendreFactor(l, m)(z, pole_margin);
}

/// m (l-m)! / (l+m)!
inline double pt_weight(int l, int m) {
  double w = m;
  for (int k = l - m + 1; k <= l + m; ++k) w /= k;
  return w;
}

/// |sum_m m(l-m)!/(l+m)! Q_l^m(z) sinh(m(z-x)) Q_l^m(x) - l(l+1)/4 (tanh z - tanh x)|
inline double legendre_identity_residual(int l, double x, cplx z, double pole_margin = 0.1) {
  cplx lhs = 0.0;
  for (int m = 1; m <= l; ++m) {
    const LegendreFactor q(l, m);
    lhs += pt_weight(l, m) * q(z, pole_margin) * std::sinh(static_cast<double>(m) * (z - x)) *
           q(cplx(x, 0.0), pole_margin);
  }
  const cplx rhs = 0.25 * l * (l + 1.0) * (sech_tanh(z).second - std::tanh(x));
  return std::abs(lhs - rhs);
}

}  // namespace supershift
