#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "parcontest/distribution.hpp"
#include "parcontest/objective.hpp"
#include "parcontest/prize.hpp"

namespace testutil {

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + (b + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// small deterministic U[0,1] stream for test-case generation
struct Stream {
  std::uint64_t state;
  explicit Stream(std::uint64_t seed) : state(seed) {}
  double unit() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }
  int pick(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(unit() * (hi - lo + 1)) % (hi - lo + 1);
  }
};

inline parcontest::SkillDistribution random_dist(std::uint64_t seed) {
  Stream s(seed);
  switch (s.pick(0, 3)) {
    case 0: {
      const double low = s.unit();
      return parcontest::SkillDistribution::uniform(low,
                                                    low + 0.5 + 1.5 * s.unit());
    }
    case 1:
      return parcontest::SkillDistribution::exponential(0.5 + 2.5 * s.unit());
    case 2:
      return parcontest::SkillDistribution::power(0.5 + 2.5 * s.unit(),
                                                  0.5 + 1.5 * s.unit());
    default: {
      const double v0 = 1.0 + s.unit();
      std::vector<std::pair<double, double>> knots{
          {0.0, v0},
          {0.3 + 0.2 * s.unit(), v0 * (0.5 + 0.2 * s.unit())},
          {1.0, v0 * 0.1 * s.unit()}};
      return parcontest::SkillDistribution::piecewise_linear(std::move(knots));
    }
  }
}

// Random market: mostly random feasible structures, occasionally a constant
// contest so the M1 branch gets exercised.
inline std::vector<parcontest::AllocationCurve> random_market(
    std::uint64_t seed, int max_m, int max_n, int& n_out) {
  Stream s(seed);
  const int n = s.pick(2, max_n);
  const int m = s.pick(1, max_m);
  n_out = n;
  std::vector<parcontest::AllocationCurve> curves;
  for (int j = 0; j < m; ++j) {
    const double budget = 0.5 + 1.5 * s.unit();
    if (m > 1 && s.unit() < 0.2) {
      const double c = budget / n * s.unit();
      curves.emplace_back(parcontest::PrizeStructure(
          std::vector<double>(static_cast<std::size_t>(n), c), budget));
    } else {
      curves.emplace_back(parcontest::random_feasible_structure(
          mix(seed, 100 + j), n, budget));
    }
  }
  return curves;
}

}  // namespace testutil
