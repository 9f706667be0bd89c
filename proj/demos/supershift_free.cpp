// d_n = max |Psi(F_n) - Psi(exp(3i.))| for the free particle on [0.1,0.5] x [-1,1].
#include <cstdio>

#include "supershift/supershift.hpp"

int main() {
  using namespace supershift;
  const auto kernel = make_kernel(Free{});
  const auto rep = supershift_experiment(*kernel, exponential_family(), {10, 20, 40}, 3.0,
                                         linspace(0.1, 0.5, 5), linspace(-1.0, 1.0, 11));
  std::printf("%4s %14s %14s\n", "n", "d_n", "metric");
  for (std::size_t i = 0; i < rep.ns.size(); ++i)
    std::printf("%4d %14.6e %14.6e\n", rep.ns[i], rep.distance[i], rep.metric[i]);
}
