#pragma once

#include <stdexcept>
#include <string>

namespace supershift {

/// Argument outside the holomorphy domain (pole margin, horizon, sector).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An intermediate exponential left the representable double range.
class overflow_error : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Adaptive quadrature or root search ran out of budget before meeting tol.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested time lies beyond the validity horizon of a Green's kernel.
class horizon_error : public domain_error {
 public:
  horizon_error(const std::string& what, double horizon)
      : domain_error(what), horizon_(horizon) {}
  double horizon() const noexcept { return horizon_; }

 private:
  double horizon_;
};

/// Extended-precision summation could not certify the requested accuracy.
class precision_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace supershift
