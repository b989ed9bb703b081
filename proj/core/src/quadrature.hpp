#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace parcontest::detail {

// Single GK15 panel with recursive bisection until the panel's absolute
// error estimate fits its share of the tolerance budget. boost's built-in
// adaptive driver keys on relative error, which never terminates on panels
// whose estimator floor sits above the requested ratio.
template <typename F>
double integrate_panel(F& f, double a, double b, double tol, int depth) {
  using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
  double err = 0.0, l1 = 0.0;
  const double value = gk::integrate(f, a, b, 0, 0.0, &err, &l1);
  if (err <= tol || depth >= 15 || b - a < 1e-14 * (1.0 + std::abs(a)))
    return value;
  const double mid = 0.5 * (a + b);
  return integrate_panel(f, a, mid, 0.5 * tol, depth + 1) +
         integrate_panel(f, mid, b, 0.5 * tol, depth + 1);
}

// Adaptive integral over [a,b], subdivided at the interior breakpoints
// (kinks of the integrand), with absolute tolerance `tol` overall.
template <typename F>
double integrate(F&& f, double a, double b, std::span<const double> breakpoints,
                 double tol) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double width = cuts[i + 1] - cuts[i];
    if (width < 1e-300) continue;
    total += integrate_panel(f, cuts[i], cuts[i + 1],
                             tol * width / (b - a), 0);
  }
  return total;
}

}  // namespace parcontest::detail
