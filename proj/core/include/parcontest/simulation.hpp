#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "parcontest/distribution.hpp"
#include "parcontest/equilibrium.hpp"
#include "parcontest/objective.hpp"

namespace parcontest {

struct GameConfig {
  int n = 2;
  SkillDistribution dist = SkillDistribution::uniform(0.0, 1.0);
  std::vector<PrizeStructure> prizes;
  std::vector<DesignerObjective> objectives;  // one per contest
  std::size_t replications = 10000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::vector<double> probe_quantiles = {0.1, 0.25, 0.5, 0.75, 0.9};
  int effort_grid = 64;
};

struct Estimate {
  double mean = 0.0;
  double half_width = 0.0;  // 95% CI from replication-level variance

  bool overlaps(const Estimate& other) const {
    return mean - half_width <= other.mean + other.half_width &&
           other.mean - other.half_width <= mean + half_width;
  }
};

struct SimulationReport {
  std::vector<Estimate> designer_utility;             // per contest
  std::vector<Estimate> participation;                // entrants per contest
  std::vector<std::vector<Estimate>> rank_effort;     // [contest][rank]
  std::vector<double> probe_quantiles;
  std::vector<Estimate> contestant_utility;           // per probe quantile
  std::size_t replications = 0;
  bool disclosed = false;

  nlohmann::json to_json() const;
};

// Monte-Carlo oracle playing the actual game: quantile sampling, contest
// choice from the finite-difference density of Phi, tabulated equilibrium
// efforts, rank-by-effort awards with skill tie-breaking.
class Simulator {
 public:
  Simulator(GameConfig config, const ChoiceProfile& profile);

  const GameConfig& config() const { return config_; }

  SimulationReport run() const;
  SimulationReport run_disclosed() const;

  // Max over probe quantiles of (best Monte-Carlo deviation utility minus
  // equilibrium utility), clipped at 0.
  double best_response_gap() const;

 private:
  struct Draw {
    double q;
    int contest;
    double effort;
  };

  Draw draw_contestant(double q, std::uint64_t& state) const;
  double beta_at(std::size_t j, double q) const;
  double disclosed_beta_at(std::size_t j, int k, double q) const;
  SimulationReport run_impl(bool disclosed) const;

  GameConfig config_;
  std::vector<PrizeStructure> prizes_;
  std::size_t contests_;

  // Tabulations on a uniform quantile grid.
  std::vector<double> grid_q_;
  std::vector<std::vector<double>> pi_tab_;    // [contest][node]
  std::vector<std::vector<double>> beta_tab_;  // [contest][node]
  // Disclosed-variant efforts, [contest][k-1][node].
  std::vector<std::vector<std::vector<double>>> disclosed_tab_;
  std::vector<double> phi_one_;  // Phi_j(1)
  double beta_max_ = 0.0;
};

}  // namespace parcontest
