#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "parcontest/distribution.hpp"
#include "parcontest/equilibrium.hpp"
#include "parcontest/prize.hpp"

namespace parcontest {

struct EffortObjective {
  std::vector<double> alpha;  // rank weights alpha_1..alpha_n
};

struct ParticipationObjective {
  double theta = 0.0;  // quantile threshold in [0,1]
};

using DesignerObjective = std::variant<EffortObjective, ParticipationObjective>;

// g_k(phi): Binomial(n-1, phi) pmf at k-1.
double rank_density(int k, int n, double phi);

// G(phi; alpha) = n * sum_k alpha_k int_0^phi g_k; evaluated in closed form
// as sum_i Pr[Bin(n,phi)=i] * (alpha_1 + ... + alpha_i).
double rank_weight(std::span<const double> alpha, double phi);

// True when sum_k alpha_k g_k(phi) is nonnegative and non-increasing.
// Non-increasing nonnegative alpha short-circuits to true.
bool is_weight_monotone(std::span<const double> alpha, int grid = 1025,
                        double tol = 1e-10);

// Designer j's effort-objective utility
//   int_0^inf v(x_j^{-1}(x) + x_{-j}^{-1}(x)) G(x_j^{-1}(x); alpha) dx.
// Requires designer j's own curve to be strictly decreasing; constant own
// curves are rejected (use the simulation oracle for those).
double effort_utility(std::size_t j, std::span<const AllocationCurve> curves,
                      const SkillDistribution& dist,
                      std::span<const double> alpha,
                      const SolverOptions& options = {});

// n * Phi_j(theta) under the equilibrium profile (distribution-free).
double participation_utility(std::size_t j,
                             std::span<const AllocationCurve> curves,
                             double theta, const SolverOptions& options = {});

struct BestResponse {
  int k = 1;            // simple-contest rank count
  double utility = 0.0; // n * share
  double share = 0.0;   // Phi_j(theta) under the chosen contest
  bool k_in_xi_argmax = false;  // consistency with argmax_k xi_k(share)
};

// Enumerates simple contests k in [n] for a designer with budget `budget`
// facing the given opponents; smallest k wins ties.
BestResponse best_response_participation(
    std::span<const AllocationCurve> opponents, double theta, double budget,
    int n, const SolverOptions& options = {});

// Draws a random feasible structure: descending nonnegative weights scaled
// to a uniform-random fraction of the budget.
PrizeStructure random_feasible_structure(std::uint64_t seed, int n,
                                         double budget);

// Checks that WTA(budget) beats `trials` random feasible structures on both
// routes: utility order within 1e-7 and single-crossing dominance.
bool wta_dominance_check(std::span<const double> alpha, double budget, int n,
                         std::span<const AllocationCurve> opponents,
                         const SkillDistribution& dist, int trials,
                         std::uint64_t seed,
                         const SolverOptions& options = {});

struct SpeSolution {
  std::vector<int> k_star;                 // per-designer rank counts
  std::vector<PrizeStructure> structures;  // the simple contests played
  double clearing_level = 0.0;             // X*
  std::vector<double> shares;              // phi*_j = xbar_j^{-1}(X*)
  std::vector<double> utilities;           // n * phi*_j
  bool unique_max_budget_case = false;     // the all-equal k=n branch fired
  double max_deviation_gain = 0.0;         // simple-contest deviation cert.
};

// Common-threshold designer equilibrium: upper envelopes
// xbar_j(phi) = T_j max_k xi_k(phi), X* = Qbar^{-1}(theta), smallest-argmax
// rank counts, and a no-profitable-deviation certificate over k' in [n].
SpeSolution solve_common_theta_spe(std::span<const double> budgets,
                                   double theta, int n,
                                   const SolverOptions& options = {});

}  // namespace parcontest
