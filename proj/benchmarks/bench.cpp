#include <benchmark/benchmark.h>

#include <vector>

#include "parcontest/equilibrium.hpp"
#include "parcontest/objective.hpp"
#include "parcontest/simulation.hpp"

using namespace parcontest;

namespace {

std::vector<AllocationCurve> sample_market() {
  std::vector<AllocationCurve> curves;
  curves.emplace_back(PrizeStructure({1.0, 0.4, 0.1, 0.0, 0.0}, 2.0));
  curves.emplace_back(PrizeStructure::simple(2, 1.5, 5));
  curves.emplace_back(PrizeStructure({0.2, 0.2, 0.2, 0.2, 0.2}, 1.0));
  return curves;
}

void bm_profile_build(benchmark::State& state) {
  const auto curves = sample_market();
  for (auto _ : state)
    benchmark::DoNotOptimize(ChoiceProfile(curves));
}
BENCHMARK(bm_profile_build);

void bm_choices(benchmark::State& state) {
  const ChoiceProfile profile(sample_market());
  double q = 0.0;
  for (auto _ : state) {
    q += 0.001;
    if (q > 1.0) q = 0.0;
    benchmark::DoNotOptimize(profile.choices(q));
  }
}
BENCHMARK(bm_choices);

void bm_effort(benchmark::State& state) {
  const ChoiceProfile profile(sample_market());
  const auto dist = SkillDistribution::exponential(1.0);
  double q = 0.0;
  for (auto _ : state) {
    q += 0.01;
    if (q > 1.0) q = 0.0;
    benchmark::DoNotOptimize(effort(profile, dist, 0, q));
  }
}
BENCHMARK(bm_effort);

void bm_effort_utility(benchmark::State& state) {
  const auto curves = sample_market();
  const auto dist = SkillDistribution::exponential(1.0);
  const std::vector<double> alpha{1.0, 1.0, 0.5, 0.0, 0.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(effort_utility(0, curves, dist, alpha));
}
BENCHMARK(bm_effort_utility);

void bm_simulation(benchmark::State& state) {
  const auto curves = sample_market();
  GameConfig config;
  config.n = 5;
  config.dist = SkillDistribution::uniform(0.0, 1.0);
  for (const auto& c : curves) {
    config.prizes.push_back(c.prizes());
    config.objectives.push_back(EffortObjective{std::vector<double>(5, 1.0)});
  }
  config.replications = static_cast<std::size_t>(state.range(0));
  const ChoiceProfile profile(curves);
  const Simulator sim(config, profile);
  for (auto _ : state)
    benchmark::DoNotOptimize(sim.run());
}
BENCHMARK(bm_simulation)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
