#pragma once

// Initial data: plane waves exp(i kappa z), the superoscillating sequence
//
//   F_n(z; k) = sum_{l=0}^{n} C_l(n; k) exp(i k_l(n) z),
//   C_l(n; k) = binom(n, l) ((1 + k)/2)^{n-l} ((1 - k)/2)^l,  k_l(n) = 1 - 2l/n,
//
// and the weighted sup metric used for supershift convergence.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "supershift/contour_quad.hpp"
#include "supershift/errors.hpp"
#include "supershift/special_fn.hpp"

namespace supershift {

template <unsigned Digits>
using mp_float = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Digits>,
                                               boost::multiprecision::et_off>;
using mp_real = mp_float<50>;  // 168-bit mantissa

/// Holomorphic function with a declared growth witness.
struct HolomorphicSignal {
  std::function<cplx(cplx)> eval;
  GrowthWitness growth;
  std::string label;

  cplx operator()(cplx z) const { return eval(z); }
};

/// phi_kappa(z) = exp(i kappa z). Real kappa gets the sharper witness
/// |phi| <= exp(|kappa| |Im z|).
inline HolomorphicSignal plane_wave(cplx kappa) {
  std::ostringstream os;
  os.precision(17);
  os << "plane:k=" << kappa.real();
  if (kappa.imag() != 0.0) os << (kappa.imag() > 0 ? "+" : "") << kappa.imag() << "i";
  GrowthWitness w{1.0, std::abs(kappa),
                  kappa.imag() == 0.0 ? GrowthWitness::Kind::imag_part
                                      : GrowthWitness::Kind::modulus};
  return {[kappa](cplx z) { return std::exp(cplx(0.0, 1.0) * kappa * z); }, w, os.str()};
}

inline HolomorphicSignal constant_signal(cplx c) {
  std::ostringstream os;
  os.precision(17);
  os << "constant:" << c.real();
  return {[c](cplx) { return c; }, {std::max(std::abs(c), 1e-300), 0.0,
                                    GrowthWitness::Kind::imag_part},
          os.str()};
}

/// sum_j c_j s_j with A = sum |c_j| A_j and B = max B_j. Mixed witness kinds
/// are promoted to the modulus kind (|Im z| <= |z|).
inline HolomorphicSignal linear_combination(std::vector<cplx> coeffs,
                                            std::vector<HolomorphicSignal> signals) {
  if (coeffs.size() != signals.size() || signals.empty())
    throw std::invalid_argument("linear_combination: need matching, nonempty lists");
  GrowthWitness w{0.0, 0.0, GrowthWitness::Kind::imag_part};
  std::string label = "combination(";
  for (std::size_t j = 0; j < signals.size(); ++j) {
    w.A += std::abs(coeffs[j]) * signals[j].growth.A;
    w.B = std::max(w.B, signals[j].growth.B);
    if (signals[j].growth.kind == GrowthWitness::Kind::modulus) w.kind = GrowthWitness::Kind::modulus;
    label += (j ? "," : "") + signals[j].label;
  }
  label += ")";
  w.A = std::max(w.A, 1e-300);
  return {[c = std::move(coeffs), s = std::move(signals)](cplx z) {
            cplx sum = 0.0;
            for (std::size_t j = 0; j < s.size(); ++j) sum += c[j] * s[j](z);
            return sum;
          },
          w, label};
}

namespace detail {

template <class R>
struct MpComplex {
  R re, im;
};

template <class R>
struct CoefficientTable {
  std::vector<R> re, im, mag;  // mag = |re| + |im|
};

template <class R>
CoefficientTable<R> build_coefficients(int n, cplx kappa) {
  const R one(1), two(2);
  const R pr = (one + R(kappa.real())) / two, pi = R(kappa.imag()) / two;
  const R qr = (one - R(kappa.real())) / two, qi = -R(kappa.imag()) / two;
  std::vector<MpComplex<R>> ppow(n + 1), qpow(n + 1);
  ppow[0] = {one, R(0)};
  qpow[0] = {one, R(0)};
  for (int j = 1; j <= n; ++j) {
    const auto& a = ppow[j - 1];
    ppow[j] = {a.re * pr - a.im * pi, a.re * pi + a.im * pr};
    const auto& b = qpow[j - 1];
    qpow[j] = {b.re * qr - b.im * qi, b.re * qi + b.im * qr};
  }
  CoefficientTable<R> t;
  t.re.resize(n + 1);
  t.im.resize(n + 1);
  t.mag.resize(n + 1);
  R binom(1);
  for (int l = 0; l <= n; ++l) {
    const auto& a = ppow[n - l];
    const auto& b = qpow[l];
    t.re[l] = binom * (a.re * b.re - a.im * b.im);
    t.im[l] = binom * (a.re * b.im + a.im * b.re);
    t.mag[l] = abs(t.re[l]) + abs(t.im[l]);
    binom = binom * R(n - l) / R(l + 1);
  }
  return t;
}

struct FnSum {
  cplx value;
  double abs_sum;    // sum_l |C_l exp(i k_l z)|, up to a factor sqrt(2)
  double round_off;  // bound on the rounding error of value
};

// exp(i z) * sum_l C_l u^l with u = exp(-2 i z / n), by Horner's rule at the
// precision of R. Horner's error is below (2n + 8) eps * sum |C_l| |u|^l.
template <class R>
FnSum fn_sum(const CoefficientTable<R>& c, int n, cplx z) {
  using std::cos, std::sin, std::exp;
  const R zr(z.real()), zi(z.imag());
  const R scale = R(2) / R(n);
  const R ur_mod = exp(zi * scale);
  const R ur = ur_mod * cos(-zr * scale), ui = ur_mod * sin(-zr * scale);
  R ar = c.re[n], ai = c.im[n], am = c.mag[n];
  for (int l = n - 1; l >= 0; --l) {
    const R nr = ar * ur - ai * ui + c.re[l];
    ai = ar * ui + ai * ur + c.im[l];
    ar = nr;
    am = am * ur_mod + c.mag[l];
  }
  const R emod = exp(-zi);
  const R er = emod * cos(zr), ei = emod * sin(zr);
  FnSum s;
  s.value = {(ar * er - ai * ei).template convert_to<double>(),
             (ar * ei + ai * er).template convert_to<double>()};
  const R abs_sum = am * emod;
  s.abs_sum = abs_sum.template convert_to<double>();
  // Formed in R: the 400-digit epsilon underflows a double. The floor keeps
  // the bound positive; a saturated (infinite) bound is never accepted.
  const R bound = R(2 * n + 8) * std::numeric_limits<R>::epsilon() * abs_sum;
  s.round_off = std::max(bound.template convert_to<double>(),
                         abs_sum > 0 ? std::numeric_limits<double>::denorm_min() : 0.0);
  return s;
}

}  // namespace detail

/// The superoscillating sequence F_n(.; kappa) with extended-precision
/// coefficient tables. Evaluation climbs a precision ladder (50, 100, 200 and
/// 400 decimal digits) until the rounding bound meets the requested accuracy.
/// Safe to share across threads; tables are built on first use.
class SuperoscSequence {
 public:
  static constexpr std::array<unsigned, 4> kLadder{50, 100, 200, 400};

  SuperoscSequence(int n, cplx kappa) : n_(n), kappa_(kappa) {
    if (n < 1) throw std::invalid_argument("SuperoscSequence: n must be >= 1");
  }

  int n() const { return n_; }
  cplx kappa() const { return kappa_; }
  /// k_l(n) = 1 - 2l/n; k_0 = 1 and k_n = -1 exactly.
  double frequency(int l) const { return l == n_ ? -1.0 : 1.0 - 2.0 * l / n_; }

  /// C_l at 50 digits.
  const detail::CoefficientTable<mp_float<50>>& coefficients() const { return table<0>(); }

  /// Relative accuracy rel_tol; throws precision_error when 400 digits do not
  /// suffice (e.g. at or extremely near a zero of F_n).
  cplx operator()(cplx z, double rel_tol = 1e-13) const {
    return climb<0>(z, [rel_tol](const detail::FnSum& s) {
      return std::isfinite(s.round_off) && s.round_off <= rel_tol * std::abs(s.value);
    });
  }

  /// Absolute accuracy abs_tol, as used at quadrature nodes.
  cplx eval_absolute(cplx z, double abs_tol) const {
    return climb<0>(z, [abs_tol](const detail::FnSum& s) { return s.round_off <= abs_tol; });
  }

  /// sum_l |C_l exp(i k_l z)| / |F_n(z)|.
  double condition(cplx z) const {
    const auto s = detail::fn_sum(table<1>(), n_, z);
    return s.abs_sum / std::abs(s.value);
  }

  /// |F_n(z)| <= exp(max(1, |kappa|) |z|), from the product form
  /// F_n(z) = (cos(z/n) + i kappa sin(z/n))^n.
  GrowthWitness growth() const { return {1.0, std::max(1.0, std::abs(kappa_))}; }

 private:
  template <std::size_t I>
  const detail::CoefficientTable<mp_float<kLadder[I]>>& table() const {
    using R = mp_float<kLadder[I]>;
    std::call_once(std::get<I>(flags_), [this] {
      std::get<I>(tables_) = std::make_unique<detail::CoefficientTable<R>>(
          detail::build_coefficients<R>(n_, kappa_));
    });
    return *std::get<I>(tables_);
  }

  template <std::size_t I, class Accept>
  cplx climb(cplx z, const Accept& accept) const {
    const auto s = detail::fn_sum(table<I>(), n_, z);
    if (accept(s)) return s.value;
    if constexpr (I + 1 < kLadder.size()) {
      return climb<I + 1>(z, accept);
    } else {
      std::ostringstream os;
      os << "eval_Fn: " << kLadder.back() << " digits cannot certify F_" << n_ << " at z = ("
         << z.real() << ", " << z.imag() << "), condition " << s.abs_sum / std::abs(s.value);
      throw precision_error(os.str());
    }
  }

  int n_;
  cplx kappa_;
  mutable std::tuple<std::once_flag, std::once_flag, std::once_flag, std::once_flag> flags_;
  mutable std::tuple<std::unique_ptr<detail::CoefficientTable<mp_float<50>>>,
                     std::unique_ptr<detail::CoefficientTable<mp_float<100>>>,
                     std::unique_ptr<detail::CoefficientTable<mp_float<200>>>,
                     std::unique_ptr<detail::CoefficientTable<mp_float<400>>>>
      tables_;
};

/// C_l(n; k) at 50 significant digits.
inline std::vector<mp_real> superosc_coefficients(int n, double k) {
  if (n < 1) throw std::invalid_argument("superosc_coefficients: n must be >= 1");
  return detail::build_coefficients<mp_real>(n, cplx(k, 0.0)).re;
}

inline cplx eval_Fn(int n, cplx kappa, cplx z, double rel_tol = 1e-13) {
  return SuperoscSequence(n, kappa)(z, rel_tol);
}

/// Plain double-precision sum of C_l exp(i k_l z), kept to document the
/// cancellation that the extended-precision path avoids.
inline cplx eval_Fn_double(int n, double k, cplx z) {
  const double p = 0.5 * (1.0 + k), q = 0.5 * (1.0 - k);
  cplx sum = 0.0;
  double binom = 1.0;
  for (int l = 0; l <= n; ++l) {
    const double c = binom * std::pow(p, n - l) * std::pow(q, l);
    sum += c * std::exp(cplx(0.0, 1.0 - 2.0 * l / n) * z);
    binom = binom * (n - l) / (l + 1);
  }
  return sum;
}

inline HolomorphicSignal superosc(int n, cplx kappa) {
  auto seq = std::make_shared<const SuperoscSequence>(n, kappa);
  std::ostringstream os;
  os.precision(17);
  os << "superosc:n=" << n << ",k=" << kappa.real();
  if (kappa.imag() != 0.0) os << (kappa.imag() > 0 ? "+" : "") << kappa.imag() << "i";
  return {[seq](cplx z) { return seq->eval_absolute(z, 1e-15 * std::max(1.0, std::abs(z))); },
          seq->growth(), os.str()};
}

/// Supershift family for exponentials: phi_kappa = exp(i kappa .) with
/// approximants F_n(.; kappa) whose frequencies stay in U = [-1, 1].
struct SupershiftFamily {
  std::function<HolomorphicSignal(cplx)> phi;
  std::function<std::shared_ptr<const SuperoscSequence>(int, cplx)> sequence;
  double freq_bound = 1.0;  // sup |k_l(n)|
  std::string label;
};

inline SupershiftFamily exponential_family() {
  return {plane_wave,
          [](int n, cplx kappa) { return std::make_shared<const SuperoscSequence>(n, kappa); },
          1.0, "exponential"};
}

/// Sample cloud for the weighted sup metric: a polar grid on the disk |z| <= r
/// plus `random` uniformly drawn points from a fixed seed.
inline std::vector<cplx> disk_samples(double radius, int rings = 16, int spokes = 32,
                                      int random = 256, std::uint64_t seed = 12345) {
  std::vector<cplx> zs{0.0};
  for (int i = 1; i <= rings; ++i)
    for (int j = 0; j < spokes; ++j)
      zs.push_back(std::polar(radius * i / rings, 2.0 * kPi * j / spokes));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int j = 0; j < random; ++j)
    zs.push_back(std::polar(radius * std::sqrt(u(rng)), 2.0 * kPi * u(rng)));
  return zs;
}

/// max over samples of |F(z) - phi(z)| exp(-C |z|), a lower bound for the sup.
template <class F, class Phi>
double supershift_metric(const F& f, const Phi& phi, double C, const std::vector<cplx>& samples) {
  double m = 0.0;
  for (cplx z : samples) m = std::max(m, std::abs(f(z) - phi(z)) * std::exp(-C * std::abs(z)));
  return m;
}

/// Default weight 2 (1 + |kappa|).
inline double default_metric_weight(cplx kappa) { return 2.0 * (1.0 + std::abs(kappa)); }

}  // namespace supershift
