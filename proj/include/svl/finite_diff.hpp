#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

// Richardson-extrapolated central differences, used as the independent
// check on every analytic gradient in the test suites.

namespace svl {

// Gradient of f: R^d -> R. Central differences at steps h and h/2 combined
// as (4 g_{h/2} - g_h)/3, step scaled per coordinate.
template <class F>
std::vector<double> fd_gradient(F&& f, const std::vector<double>& x,
                                double step_rel = 1e-5) {
  const std::size_t d = x.size();
  std::vector<double> g(d), xp(x);
  for (std::size_t i = 0; i < d; ++i) {
    const double hstep = step_rel * (1.0 + std::fabs(x[i]));
    auto central = [&](double hh) {
      xp[i] = x[i] + hh;
      const double fp = f(xp);
      xp[i] = x[i] - hh;
      const double fm = f(xp);
      xp[i] = x[i];
      if (!std::isfinite(fp) || !std::isfinite(fm))
        throw std::domain_error("fd_gradient: non-finite evaluation");
      return (fp - fm) / (2.0 * hh);
    };
    const double g1 = central(hstep);
    const double g2 = central(0.5 * hstep);
    g[i] = (4.0 * g2 - g1) / 3.0;
  }
  return g;
}

}  // namespace svl
