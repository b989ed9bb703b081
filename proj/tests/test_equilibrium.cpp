#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "parcontest/equilibrium.hpp"
#include "helpers.hpp"

using namespace parcontest;

namespace {

std::vector<AllocationCurve> wta_market(std::vector<double> budgets, int n) {
  std::vector<AllocationCurve> curves;
  for (double t : budgets)
    curves.emplace_back(PrizeStructure::simple(1, t, n));
  return curves;
}

}  // namespace

TEST_CASE("aggregate supply fixture") {
  const auto curves = wta_market({1.0, 1.0}, 2);
  const ChoiceProfile profile(curves);
  // Q(x) = 2(1 - x) on [0, 1]
  CHECK(profile.aggregate_supply(0.25) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(profile.aggregate_supply(1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(profile.invert_supply(0.5) == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("single contest collapses to identity") {
  const ChoiceProfile profile(wta_market({1.0}, 2));
  for (double q : {0.0, 0.2, 0.5, 0.8, 1.0})
    CHECK(profile.choice(0, q) == doctest::Approx(q).epsilon(1e-10));
  CHECK(verify_equilibrium(profile, 101) == 0.0);
}

TEST_CASE("identical contests split evenly") {
  const ChoiceProfile profile(wta_market({1.0, 1.0}, 2));
  for (double q : {0.1, 0.4, 0.7, 1.0}) {
    const auto phis = profile.choices(q);
    CHECK(phis[0] == doctest::Approx(q / 2).epsilon(1e-9));
    CHECK(phis[1] == doctest::Approx(q / 2).epsilon(1e-9));
  }
}

TEST_CASE("asymmetric WTA piecewise solution") {
  const ChoiceProfile profile(wta_market({1.0, 2.0}, 2));
  for (double q : {0.1, 0.3, 0.5}) {
    const auto phis = profile.choices(q);
    CHECK(phis[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(phis[1] == doctest::Approx(q).epsilon(1e-9));
  }
  for (double q : {0.6, 0.8, 1.0}) {
    const auto phis = profile.choices(q);
    CHECK(phis[0] == doctest::Approx((2 * q - 1) / 3).epsilon(1e-9));
    CHECK(phis[1] == doctest::Approx((1 + q) / 3).epsilon(1e-9));
  }
}

TEST_CASE("choice strategies are valid on random markets") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    int n = 0;
    const auto curves = testutil::random_market(seed, 5, 10, n);
    const ChoiceProfile profile(curves);
    std::vector<double> prev(curves.size(), 0.0);
    for (int i = 0; i <= 200; ++i) {
      const double q = i / 200.0;
      const auto phis = profile.choices(q);
      double sum = 0.0;
      for (std::size_t j = 0; j < phis.size(); ++j) {
        CHECK(phis[j] >= prev[j] - 1e-10);  // non-decreasing
        sum += phis[j];
        prev[j] = phis[j];
      }
      CHECK(sum == doctest::Approx(q).epsilon(1e-9));
      if (i == 0)
        for (double phi : phis) CHECK(phi == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("constant contests idle until the onset quantile") {
  std::vector<AllocationCurve> curves = wta_market({1.0}, 2);
  curves.emplace_back(PrizeStructure({0.25, 0.25}, 1.0));
  const ChoiceProfile profile(curves);
  const double q_star = profile.constant_onset();
  CHECK(q_star == doctest::Approx(0.75).epsilon(1e-9));  // x1^{-1}(0.25)
  CHECK(profile.choice(1, 0.5) == doctest::Approx(0.0));
  CHECK(profile.choice(1, 1.0) == doctest::Approx(0.25).epsilon(1e-9));
  const auto phis = profile.choices(0.9);
  CHECK(phis[0] + phis[1] == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("effort closed form for single WTA") {
  const ChoiceProfile profile(wta_market({1.0}, 2));
  const auto dist = SkillDistribution::uniform(0.0, 1.0);
  for (int i = 0; i <= 10; ++i) {
    const double q = i / 10.0;
    CHECK(effort(profile, dist, 0, q) ==
          doctest::Approx((1 - q) * (1 - q) / 2).epsilon(1e-8));
  }
  CHECK(effort(profile, dist, 0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("constant contest effort is zero") {
  std::vector<AllocationCurve> curves = wta_market({1.0}, 2);
  curves.emplace_back(PrizeStructure({0.25, 0.25}, 1.0));
  const ChoiceProfile profile(curves);
  const auto dist = SkillDistribution::uniform(0.0, 1.0);
  for (double q : {0.0, 0.5, 0.9})
    CHECK(effort(profile, dist, 1, q) == 0.0);
}

TEST_CASE("effort strictly decreasing where the contest is active") {
  const ChoiceProfile profile(wta_market({1.0, 2.0}, 2));
  const auto dist = SkillDistribution::exponential(1.0);
  double prev = effort(profile, dist, 1, 0.1);
  for (double q : {0.3, 0.5, 0.7, 0.9}) {
    const double cur = effort(profile, dist, 1, q);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("interim utility closed form and dual route") {
  const ChoiceProfile profile(wta_market({1.0}, 2));
  const auto dist = SkillDistribution::uniform(0.0, 1.0);
  for (int i = 0; i <= 10; ++i) {
    const double q = i / 10.0;
    CHECK(interim_utility(profile, dist, 0, q) ==
          doctest::Approx((1 - q) * (1 - q) / 2).epsilon(1e-8));
  }
}

TEST_CASE("dual utility routes agree on random markets") {
  for (std::uint64_t seed = 50; seed < 62; ++seed) {
    int n = 0;
    const auto curves = testutil::random_market(seed, 3, 6, n);
    const ChoiceProfile profile(curves);
    const auto dist = testutil::random_dist(seed + 1000);
    for (std::size_t j = 0; j < curves.size(); ++j) {
      double prev = std::numeric_limits<double>::infinity();
      for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double direct = interim_utility(profile, dist, j, q);
        const double by_parts = interim_utility_integrated(profile, dist, j, q);
        CHECK(direct == doctest::Approx(by_parts).epsilon(1e-8));
        CHECK(direct <= prev + 1e-9);  // non-increasing in q
        prev = direct;
      }
    }
  }
}

TEST_CASE("verify_equilibrium accepts solved profiles") {
  for (std::uint64_t seed = 70; seed < 90; ++seed) {
    int n = 0;
    const auto curves = testutil::random_market(seed, 5, 10, n);
    const ChoiceProfile profile(curves);
    CHECK(verify_equilibrium(profile, 201) <= 1e-6);
  }
}

TEST_CASE("verify detects a swapped profile") {
  const auto curves = wta_market({1.0, 2.0}, 2);
  const ChoiceProfile profile(curves);
  const auto swapped = [&](std::size_t j, double q) {
    return profile.choice(1 - j, q);
  };
  CHECK(verify_choice_strategy(curves, swapped, 101) > 0.05);
}

TEST_CASE("verify detects a mass perturbation") {
  const auto curves = wta_market({1.0, 2.0}, 2);
  const ChoiceProfile profile(curves);
  const auto perturbed = [&](std::size_t j, double q) {
    // move eps = 0.05 from contest 2 to contest 1 on the upper band
    const double eps = 0.05 * std::clamp((q - 0.55) / 0.05, 0.0, 1.0);
    const double base = profile.choice(j, q);
    return j == 0 ? base + eps : base - eps;
  };
  CHECK(verify_choice_strategy(curves, perturbed, 101) > 0.01);
}

TEST_CASE("disclosed effort basics") {
  const ChoiceProfile profile(wta_market({1.0}, 2));
  const auto dist = SkillDistribution::uniform(0.0, 1.0);
  for (double q : {0.0, 0.4, 0.9})
    CHECK(disclosed_effort(profile, dist, 0, 1, q) == 0.0);
  // single contest: Phi(1) = 1, so k = n coincides with the baseline effort
  for (double q : {0.0, 0.25, 0.5, 0.75})
    CHECK(disclosed_effort(profile, dist, 0, 2, q) ==
          doctest::Approx(effort(profile, dist, 0, q)).epsilon(1e-8));
}

TEST_CASE("disclosed effort requires positive participation") {
  std::vector<AllocationCurve> curves = wta_market({1.0}, 2);
  curves.emplace_back(PrizeStructure({0.0, 0.0}, 0.0));
  const ChoiceProfile profile(curves);
  const auto dist = SkillDistribution::uniform(0.0, 1.0);
  CHECK_THROWS_AS(disclosed_effort(profile, dist, 1, 2, 0.5),
                  std::domain_error);
}

TEST_CASE("disclosed effort averages back to the baseline") {
  const ChoiceProfile profile(wta_market({1.0, 2.0}, 2));
  const auto dist = SkillDistribution::uniform(0.0, 1.0);
  const int n = 2;
  for (std::size_t j : {std::size_t{0}, std::size_t{1}}) {
    const double p = profile.choice(j, 1.0);
    if (p <= 1e-12) continue;
    for (double q : {0.0, 0.3, 0.6, 0.9}) {
      double expected = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double weight = k == 1 ? 1.0 - p : p;  // Binomial(1, p) at k-1
        expected += weight * disclosed_effort(profile, dist, j, k, q);
      }
      CHECK(expected ==
            doctest::Approx(effort(profile, dist, j, q)).epsilon(1e-8));
    }
  }
}

TEST_CASE("expected prize identity") {
  const PrizeStructure w({1.0, 0.5, 0.0}, 2.0);
  CHECK(expected_prize_identity_residual(w, 0.6, 0.3) <= 1e-12);
  CHECK(expected_prize_identity_residual(w, 1.0, 0.4) <= 1e-12);
  CHECK_THROWS(expected_prize_identity_residual(w, 0.0, 0.0));
  for (std::uint64_t seed = 500; seed < 700; ++seed) {
    testutil::Stream s(seed);
    const int n = s.pick(2, 12);
    const auto rand_w = random_feasible_structure(seed, n, 1.0 + s.unit());
    const double p = 0.05 + 0.95 * s.unit();
    const double level = p * s.unit();
    CHECK(expected_prize_identity_residual(rand_w, p, level) <= 1e-12);
  }
}
