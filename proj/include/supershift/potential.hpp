#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "supershift/errors.hpp"

namespace supershift {

/// Real time-dependent field strength lambda(t): constant, a + b sin(omega t),
/// or a table interpolated by a natural cubic spline (held constant outside
/// the tabulated range).
class TimeProfile {
 public:
  enum class Kind { constant, sinusoid, table };

  static TimeProfile constant(double c) {
    TimeProfile p;
    p.kind_ = Kind::constant;
    p.a_ = c;
    return p;
  }

  static TimeProfile sinusoid(double a, double b, double omega) {
    TimeProfile p;
    p.kind_ = Kind::sinusoid;
    p.a_ = a;
    p.b_ = b;
    p.omega_ = omega;
    return p;
  }

  static TimeProfile table(std::vector<double> ts, std::vector<double> vs) {
    if (ts.size() != vs.size() || ts.size() < 2)
      throw std::invalid_argument("TimeProfile::table: need >= 2 (t, value) pairs");
    for (std::size_t i = 1; i < ts.size(); ++i)
      if (!(ts[i] > ts[i - 1]))
        throw std::invalid_argument("TimeProfile::table: times must be strictly increasing");
    TimeProfile p;
    p.kind_ = Kind::table;
    p.ts_ = std::move(ts);
    p.vs_ = std::move(vs);
    p.build_spline();
    return p;
  }

  double operator()(double t) const {
    switch (kind_) {
      case Kind::constant:
        return a_;
      case Kind::sinusoid:
        return a_ + b_ * std::sin(omega_ * t);
      case Kind::table:
        return spline(t);
    }
    return 0.0;
  }

  Kind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double omega() const { return omega_; }
  const std::vector<double>& times() const { return ts_; }
  const std::vector<double>& values() const { return vs_; }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
      case Kind::constant:
        os << "constant(" << a_ << ")";
        break;
      case Kind::sinusoid:
        os << "sinusoid(" << a_ << "," << b_ << "," << omega_ << ")";
        break;
      case Kind::table:
        os << "table(" << ts_.size() << " points)";
        break;
    }
    return os.str();
  }

 private:
  void build_spline() {
    const std::size_t n = ts_.size();
    m_.assign(n, 0.0);
    if (n < 3) return;
    // Tridiagonal solve for second derivatives, natural end conditions.
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = ts_[i] - ts_[i - 1];
      const double h1 = ts_[i + 1] - ts_[i];
      const double rhs = 6.0 * ((vs_[i + 1] - vs_[i]) / h1 - (vs_[i] - vs_[i - 1]) / h0);
      const double diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
      c[i] = h1 / diag;
      d[i] = (rhs - h0 * d[i - 1]) / diag;
    }
    for (std::size_t i = n - 2; i >= 1; --i) m_[i] = d[i] - c[i] * m_[i + 1];
  }

  double spline(double t) const {
    if (t <= ts_.front()) return vs_.front();
    if (t >= ts_.back()) return vs_.back();
    const auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - ts_.begin()) - 1;
    const double h = ts_[k + 1] - ts_[k];
    const double A = (ts_[k + 1] - t) / h;
    const double B = 1.0 - A;
    return A * vs_[k] + B * vs_[k + 1] +
           ((A * A * A - A) * m_[k] + (B * B * B - B) * m_[k + 1]) * h * h / 6.0;
  }

  Kind kind_ = Kind::constant;
  double a_ = 0.0, b_ = 0.0, omega_ = 0.0;
  std::vector<double> ts_, vs_, m_;
};

struct Free {};
/// V(t,x) = lambda(t) x
struct Electric {
  TimeProfile lambda;
};
/// V(t,x) = lambda(t) x^2
struct Harmonic {
  TimeProfile lambda;
};
/// V(x) = -l(l+1) / cosh^2(x)
struct PoschlTeller {
  int l = 1;
};

using Potential = std::variant<Free, Electric, Harmonic, PoschlTeller>;

inline std::string potential_label(const Potential& p) {
  struct {
    std::string operator()(const Free&) const { return "free"; }
    std::string operator()(const Electric& e) const {
      return "electric:lambda=" + e.lambda.describe();
    }
    std::string operator()(const Harmonic& h) const {
      return "harmonic:lambda=" + h.lambda.describe();
    }
    std::string operator()(const PoschlTeller& pt) const {
      return "poschl-teller:l=" + std::to_string(pt.l);
    }
  } visitor;
  return std::visit(visitor, p);
}

inline double potential_value(const Potential& p, double t, double x) {
  struct {
    double t, x;
    double operator()(const Free&) const { return 0.0; }
    double operator()(const Electric& e) const { return e.lambda(t) * x; }
    double operator()(const Harmonic& h) const { return h.lambda(t) * x * x; }
    double operator()(const PoschlTeller& pt) const {
      const double c = std::cosh(x);
      return -pt.l * (pt.l + 1.0) / (c * c);
    }
  } visitor{t, x};
  return std::visit(visitor, p);
}

}  // namespace supershift
