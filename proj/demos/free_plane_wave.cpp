// Free-particle evolution of exp(3iz), compared with exp(3ix - 9it).
#include <cstdio>

#include "supershift/supershift.hpp"

int main() {
  using namespace supershift;
  const auto kernel = make_kernel(Free{});
  const auto F = plane_wave(3.0);
  for (double t : {0.1, 0.5, 1.0})
    for (double x : {-1.0, 0.0, 2.0}) {
      const auto r = wavefunction(*kernel, F, t, x, 1e-12);
      const cplx exact = std::exp(cplx(0.0, 3.0 * x - 9.0 * t));
      std::printf("t=%.2f x=%+.2f  psi=(% .12f, % .12f)  |err|=%.2e  panels=%d\n", t, x,
                  r.value.real(), r.value.imag(), std::abs(r.value - exact), r.panels_used);
    }
}
