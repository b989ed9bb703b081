#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "parcontest/simulation.hpp"
#include "helpers.hpp"

using namespace parcontest;

namespace {

GameConfig wta_game(std::vector<double> budgets, int n) {
  GameConfig config;
  config.n = n;
  for (double t : budgets) {
    config.prizes.push_back(PrizeStructure::simple(1, t, n));
    config.objectives.push_back(EffortObjective{std::vector<double>(n, 1.0)});
  }
  return config;
}

std::vector<AllocationCurve> curves_of(const GameConfig& config) {
  std::vector<AllocationCurve> curves;
  for (const auto& w : config.prizes) curves.emplace_back(w);
  return curves;
}

}  // namespace

TEST_CASE("single WTA total effort matches the closed form") {
  GameConfig config = wta_game({1.0}, 2);
  config.replications = 100000;
  config.seed = 11;
  const ChoiceProfile profile(curves_of(config));
  const Simulator sim(config, profile);
  const SimulationReport report = sim.run();
  CHECK(report.designer_utility[0].half_width < 0.01);
  CHECK(std::abs(report.designer_utility[0].mean - 1.0 / 3) <=
        report.designer_utility[0].half_width);
  // probe quantiles against the interim utility closed form (1-q)^2/2
  for (std::size_t i = 0; i < report.probe_quantiles.size(); ++i) {
    const double q = report.probe_quantiles[i];
    const double expected = (1 - q) * (1 - q) / 2;
    // 2x the 95% half-width: ~3 sigma, keeps the joint check over five
    // probes off the 1-in-4 failure rate a plain CI test would carry
    CHECK(std::abs(report.contestant_utility[i].mean - expected) <=
          2 * report.contestant_utility[i].half_width + 1e-9);
  }
}

TEST_CASE("identical contests get symmetric participation") {
  GameConfig config = wta_game({1.0, 1.0}, 2);
  config.replications = 50000;
  config.seed = 3;
  const ChoiceProfile profile(curves_of(config));
  const SimulationReport report = Simulator(config, profile).run();
  CHECK(report.participation[0].overlaps(report.participation[1]));
  // counts sum to n per replication, so the means sum to n exactly
  CHECK(report.participation[0].mean + report.participation[1].mean ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("participation estimates match the analytic utilities") {
  GameConfig config = wta_game({1.0, 2.0}, 2);
  config.objectives = {ParticipationObjective{0.6},
                       ParticipationObjective{0.6}};
  config.replications = 100000;
  config.seed = 21;
  const ChoiceProfile profile(curves_of(config));
  const SimulationReport report = Simulator(config, profile).run();
  CHECK(std::abs(report.designer_utility[0].mean - 2 * (2 * 0.6 - 1) / 3) <=
        report.designer_utility[0].half_width);
  CHECK(std::abs(report.designer_utility[1].mean - 2 * (1 + 0.6) / 3) <=
        report.designer_utility[1].half_width);
}

TEST_CASE("rank efforts are ordered") {
  GameConfig config = wta_game({1.0}, 4);
  config.replications = 20000;
  config.seed = 9;
  const ChoiceProfile profile(curves_of(config));
  const SimulationReport report = Simulator(config, profile).run();
  const auto& ranks = report.rank_effort[0];
  for (std::size_t k = 1; k < ranks.size(); ++k)
    CHECK(ranks[k - 1].mean >= ranks[k].mean - 1e-9);
}

TEST_CASE("determinism across repeats and thread counts") {
  GameConfig config = wta_game({1.0, 2.0}, 3);
  config.replications = 20000;
  config.seed = 77;
  const ChoiceProfile profile(curves_of(config));
  const std::string once = Simulator(config, profile).run().to_json().dump();
  const std::string twice = Simulator(config, profile).run().to_json().dump();
  CHECK(once == twice);
  config.threads = 4;
  const std::string parallel =
      Simulator(config, profile).run().to_json().dump();
  CHECK(once == parallel);
  config.threads = 1;
  config.seed = 78;
  const std::string other = Simulator(config, profile).run().to_json().dump();
  CHECK(once != other);
}

TEST_CASE("confidence intervals shrink like one over sqrt(replications)") {
  GameConfig config = wta_game({1.0}, 2);
  config.seed = 5;
  const ChoiceProfile profile(curves_of(config));
  config.replications = 20000;
  const double narrow_base =
      Simulator(config, profile).run().designer_utility[0].half_width;
  config.replications = 80000;  // quadruple -> expect half the width
  const double wide_base =
      Simulator(config, profile).run().designer_utility[0].half_width;
  const double ratio = wide_base / narrow_base;
  CHECK(ratio > 0.5 * 0.8);
  CHECK(ratio < 0.5 * 1.2);
}

TEST_CASE("best response gap is small at equilibrium") {
  GameConfig config = wta_game({1.0, 2.0}, 2);
  config.replications = 40000;
  config.seed = 31;
  const ChoiceProfile profile(curves_of(config));
  CHECK(Simulator(config, profile).best_response_gap() <= 0.01);
}

TEST_CASE("best response gap flags a wrong profile") {
  // all equilibrium mass forced onto contest 1 while contest 2 pays the same
  GameConfig config = wta_game({1.0, 1.0}, 2);
  config.replications = 40000;
  config.seed = 13;
  std::vector<AllocationCurve> lopsided{
      AllocationCurve(PrizeStructure::simple(1, 1.0, 2)),
      AllocationCurve(PrizeStructure({0.0, 0.0}, 0.0))};
  const ChoiceProfile profile(lopsided);
  CHECK(Simulator(config, profile).best_response_gap() > 0.05);
}

TEST_CASE("zero budgets give a zero gap") {
  GameConfig config = wta_game({0.0, 0.0}, 2);
  config.replications = 5000;
  config.seed = 2;
  const ChoiceProfile profile(curves_of(config));
  CHECK(Simulator(config, profile).best_response_gap() == 0.0);
}

TEST_CASE("disclosed variant matches the baseline") {
  for (std::uint64_t seed : {401ULL, 402ULL, 403ULL}) {
    int n = 0;
    const auto curves = testutil::random_market(seed, 3, 4, n);
    GameConfig config;
    config.n = n;
    for (const auto& c : curves) {
      config.prizes.push_back(c.prizes());
      config.objectives.push_back(
          EffortObjective{std::vector<double>(n, 1.0)});
    }
    config.replications = 60000;
    config.seed = seed;
    config.threads = 4;
    const ChoiceProfile profile(curves);
    const Simulator sim(config, profile);
    const SimulationReport base = sim.run();
    const SimulationReport disclosed = sim.run_disclosed();
    CHECK(disclosed.disclosed);
    for (std::size_t j = 0; j < curves.size(); ++j)
      CHECK(base.designer_utility[j].overlaps(disclosed.designer_utility[j]));
    for (std::size_t i = 0; i < base.probe_quantiles.size(); ++i)
      CHECK(base.contestant_utility[i].overlaps(disclosed.contestant_utility[i]));
  }
}

TEST_CASE("degenerate single-player field") {
  GameConfig config;
  config.n = 1;
  config.prizes.push_back(PrizeStructure({0.7}, 1.0));
  config.objectives.push_back(EffortObjective{std::vector<double>{1.0}});
  config.replications = 2000;
  config.seed = 17;
  const ChoiceProfile profile({AllocationCurve(config.prizes[0])});
  const SimulationReport report = Simulator(config, profile).run_disclosed();
  CHECK(report.designer_utility[0].mean == doctest::Approx(0.0));  // no effort
  CHECK(report.participation[0].mean == doctest::Approx(1.0));
  for (std::size_t i = 0; i < report.probe_quantiles.size(); ++i) {
    const double q = report.probe_quantiles[i];
    CHECK(report.contestant_utility[i].mean ==
          doctest::Approx(0.7 * (1 - q)).epsilon(1e-9));
    CHECK(report.contestant_utility[i].half_width ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}
