#pragma once

// Coefficient functions of the electric-field and harmonic-oscillator
// propagators:
//
//   electric:  t a'' + 2 a' = -lambda,  b' = -t^2 a'^2,  a(0) = b(0) = 0, t a' -> 0
//   harmonic:  a'' = -4 lambda a,  b'' = -4 lambda b,  a(0) = b'(0) = 0, b(0) = a'(0) = 1

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "supershift/contour_quad.hpp"
#include "supershift/errors.hpp"

namespace supershift {

using TimeFunction = std::function<double(double)>;

namespace detail {

/// Dormand-Prince 5(4) with step-size control. Accepted steps are kept;
/// values between them come from one extra step of the same scheme started
/// at the preceding accepted point, so dense values carry the local accuracy
/// of the integrator.
template <std::size_t N>
class DormandPrince {
 public:
  using State = std::array<double, N>;
  using Rhs = std::function<State(double, const State&)>;

  DormandPrince(Rhs rhs, double tol) : rhs_(std::move(rhs)), tol_(tol) {}

  void integrate(double t0, const State& y0, double t_end) {
    ts_ = {t0};
    ys_ = {y0};
    double t = t0;
    State y = y0;
    double h = std::min(1e-3, 0.01 * (t_end - t0));
    int rejected = 0;
    while (t < t_end) {
      if (t + h > t_end) h = t_end - t;
      State err;
      const State next = step(t, y, h, &err);
      double norm = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double sc = tol_ * (1.0 + std::max(std::abs(y[i]), std::abs(next[i])));
        norm = std::max(norm, std::abs(err[i]) / sc);
      }
      if (norm <= 1.0 || h < 1e-14 * (1.0 + std::abs(t))) {
        t += h;
        y = next;
        ts_.push_back(t);
        ys_.push_back(y);
        rejected = 0;
      } else if (++rejected > 100) {
        throw convergence_error("DormandPrince: step size underflow");
      }
      const double fac = norm == 0.0 ? 5.0 : 0.9 * std::pow(norm, -0.2);
      h *= std::clamp(fac, 0.2, 5.0);
    }
  }

  State operator()(double t) const {
    if (t < ts_.front() || t > ts_.back())
      throw domain_error("DormandPrince: t outside the integrated range");
    auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
    const std::size_t k = static_cast<std::size_t>(std::distance(ts_.begin(), it)) - 1;
    if (ts_[k] == t) return ys_[k];
    return step(ts_[k], ys_[k], t - ts_[k], nullptr);
  }

  double t_end() const { return ts_.back(); }
  std::span<const double> times() const { return ts_; }
  std::span<const State> states() const { return ys_; }
  const Rhs& rhs() const { return rhs_; }

 private:
  State step(double t, const State& y, double h, State* err) const {
    auto axpy = [&](std::initializer_list<std::pair<double, const State*>> terms) {
      State r = y;
      for (const auto& [c, k] : terms)
        for (std::size_t i = 0; i < N; ++i) r[i] += h * c * (*k)[i];
      return r;
    };
    const State k1 = rhs_(t, y);
    const State k2 = rhs_(t + h / 5.0, axpy({{1.0 / 5.0, &k1}}));
    const State k3 = rhs_(t + 3.0 * h / 10.0, axpy({{3.0 / 40.0, &k1}, {9.0 / 40.0, &k2}}));
    const State k4 = rhs_(t + 4.0 * h / 5.0,
                          axpy({{44.0 / 45.0, &k1}, {-56.0 / 15.0, &k2}, {32.0 / 9.0, &k3}}));
    const State k5 = rhs_(t + 8.0 * h / 9.0, axpy({{19372.0 / 6561.0, &k1},
                                                  {-25360.0 / 2187.0, &k2},
                                                  {64448.0 / 6561.0, &k3},
                                                  {-212.0 / 729.0, &k4}}));
    const State k6 = rhs_(t + h, axpy({{9017.0 / 3168.0, &k1},
                                       {-355.0 / 33.0, &k2},
                                       {46732.0 / 5247.0, &k3},
                                       {49.0 / 176.0, &k4},
                                       {-5103.0 / 18656.0, &k5}}));
    const State y5 = axpy({{35.0 / 384.0, &k1},
                           {500.0 / 1113.0, &k3},
                           {125.0 / 192.0, &k4},
                           {-2187.0 / 6784.0, &k5},
                           {11.0 / 84.0, &k6}});
    if (err) {
      const State k7 = rhs_(t + h, y5);
      for (std::size_t i = 0; i < N; ++i)
        (*err)[i] = h * (71.0 / 57600.0 * k1[i] - 71.0 / 16695.0 * k3[i] +
                         71.0 / 1920.0 * k4[i] - 17253.0 / 339200.0 * k5[i] +
                         22.0 / 525.0 * k6[i] - 1.0 / 40.0 * k7[i]);
    }
    return y5;
  }

  Rhs rhs_;
  double tol_;
  std::vector<double> ts_;
  std::vector<State> ys_;
};

// First t in (t_k, t_{k+1}] where component `idx` of the dense solution
// changes sign, refined by bisection; +inf if none.
template <std::size_t N>
double first_sign_change(const DormandPrince<N>& sol, std::size_t idx, double abs_tol) {
  const auto ts = sol.times();
  const auto ys = sol.states();
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double prev = ys[k - 1][idx];
    const double cur = ys[k][idx];
    // Skip the exact zero at t = 0 used as initial value.
    if (k == 1 && prev == 0.0) continue;
    if ((prev > 0.0) != (cur > 0.0)) {
      double lo = ts[k - 1], hi = ts[k];
      const bool lo_pos = prev > 0.0;
      while (hi - lo > abs_tol) {
        const double mid = 0.5 * (lo + hi);
        ((sol(mid)[idx] > 0.0) == lo_pos ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Electric-field coefficients, integrated in the regularized form
/// a'(t) = -\int_0^1 s lambda(s t) ds (equivalently t^2 a' = -\int_0^t s lambda).
class ElectricCoeffs {
 public:
  ElectricCoeffs(TimeFunction lambda, double t_max, double tol)
      : lambda_(std::move(lambda)),
        t_max_(t_max),
        tol_(tol),
        solver_(std::make_shared<detail::DormandPrince<2>>(
            [this](double t, const std::array<double, 2>&) {
              const double g = alpha_prime(t);
              return std::array<double, 2>{g, -t * t * g * g};
            },
            tol)) {
    if (!(t_max > 0.0)) throw domain_error("solve_electric: t_max must be positive");
    solver_->integrate(0.0, {0.0, 0.0}, t_max);
  }

  ElectricCoeffs(const ElectricCoeffs&) = delete;
  ElectricCoeffs& operator=(const ElectricCoeffs&) = delete;

  double alpha_prime(double t) const {
    const auto g = [&](double s) { return cplx(s * lambda_(s * t), 0.0); };
    const auto r = detail::adaptive_panels(g, {0.0, 0.5, 1.0}, 1e-3 * tol_, 4000);
    return -r.value.real();
  }
  double alpha(double t) const { return (*solver_)(check(t))[0]; }
  double beta(double t) const { return (*solver_)(check(t))[1]; }
  double lambda(double t) const { return lambda_(t); }
  double t_max() const { return t_max_; }

 private:
  double check(double t) const {
    if (t < 0.0 || t > t_max_)
      throw horizon_error("electric coefficients solved only on [0, t_max]", t_max_);
    return t;
  }

  TimeFunction lambda_;
  double t_max_;
  double tol_;
  std::shared_ptr<detail::DormandPrince<2>> solver_;
};

/// Harmonic-oscillator coefficients with their first zeros.
///
/// horizon() is the first positive zero of alpha (the kernel's own limit);
/// evolution_horizon() additionally stops at the first zero of beta, past
/// which a = beta / (4 alpha) is no longer positive.
class HarmonicCoeffs {
 public:
  using State = std::array<double, 4>;  // alpha, alpha', beta, beta'

  HarmonicCoeffs(TimeFunction lambda, double t_max, double tol)
      : lambda_(std::move(lambda)), t_max_(t_max) {
    if (!(t_max > 0.0)) throw domain_error("solve_harmonic: t_max must be positive");
    solver_ = std::make_shared<detail::DormandPrince<4>>(
        [lam = lambda_](double t, const State& y) {
          const double l4 = -4.0 * lam(t);
          return State{y[1], l4 * y[0], y[3], l4 * y[2]};
        },
        tol);
    solver_->integrate(0.0, {0.0, 1.0, 1.0, 0.0}, t_max);
    horizon_ = detail::first_sign_change(*solver_, 0, 1e-13);
    beta_zero_ = detail::first_sign_change(*solver_, 2, 1e-13);
  }

  HarmonicCoeffs(const HarmonicCoeffs&) = delete;
  HarmonicCoeffs& operator=(const HarmonicCoeffs&) = delete;

  State state(double t) const {
    if (t < 0.0 || t > t_max_)
      throw horizon_error("harmonic coefficients solved only on [0, t_max]", t_max_);
    return (*solver_)(t);
  }
  double alpha(double t) const { return state(t)[0]; }
  double alpha_prime(double t) const { return state(t)[1]; }
  double beta(double t) const { return state(t)[2]; }
  double beta_prime(double t) const { return state(t)[3]; }
  double lambda(double t) const { return lambda_(t); }

  /// First positive zero of alpha, +inf if alpha > 0 on (0, t_max].
  double horizon() const { return horizon_; }
  double beta_zero() const { return beta_zero_; }
  double evolution_horizon() const { return std::min(horizon_, beta_zero_); }
  double t_max() const { return t_max_; }

 private:
  TimeFunction lambda_;
  double t_max_;
  std::shared_ptr<detail::DormandPrince<4>> solver_;
  double horizon_ = 0.0;
  double beta_zero_ = 0.0;
};

inline std::shared_ptr<const ElectricCoeffs> solve_electric(TimeFunction lambda, double t_max,
                                                            double tol = 1e-12) {
  return std::make_shared<const ElectricCoeffs>(std::move(lambda), t_max, tol);
}

inline std::shared_ptr<const HarmonicCoeffs> solve_harmonic(TimeFunction lambda, double t_max,
                                                            double tol = 1e-12) {
  return std::make_shared<const HarmonicCoeffs>(std::move(lambda), t_max, tol);
}

/// max over grid of |alpha' beta - alpha beta' - 1|.
inline double wronskian_drift(const HarmonicCoeffs& c, std::span<const double> grid) {
  double drift = 0.0;
  for (double t : grid) {
    const auto s = c.state(t);
    drift = std::max(drift, std::abs(s[1] * s[2] - s[0] * s[3] - 1.0));
  }
  return drift;
}

}  // namespace supershift
