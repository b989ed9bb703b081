#pragma once

#include <cmath>
#include <vector>

namespace parcontest::detail {

// Binomial(trials, p) pmf over 0..trials by term recurrence, run from the
// larger endpoint so every factor stays well scaled.
inline std::vector<double> binomial_pmf(int trials, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(trials) + 1, 0.0);
  if (trials == 0 || p <= 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p >= 1.0) {
    pmf[trials] = 1.0;
    return pmf;
  }
  if (p <= 0.5) {
    double term = std::pow(1.0 - p, trials);
    const double ratio = p / (1.0 - p);
    for (int i = 0; i <= trials; ++i) {
      pmf[i] = term;
      term *= ratio * static_cast<double>(trials - i) /
              static_cast<double>(i + 1);
    }
  } else {
    double term = std::pow(p, trials);
    const double ratio = (1.0 - p) / p;
    for (int i = trials; i >= 0; --i) {
      pmf[i] = term;
      term *= ratio * static_cast<double>(i) /
              static_cast<double>(trials - i + 1);
    }
  }
  return pmf;
}

}  // namespace parcontest::detail
