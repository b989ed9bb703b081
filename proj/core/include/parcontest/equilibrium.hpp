#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "parcontest/distribution.hpp"
#include "parcontest/prize.hpp"

namespace parcontest {

struct SolverOptions {
  double bisect_tol = 1e-12;    // tolerance of the inversion bisections
  double quad_tol = 1e-9;       // absolute quadrature tolerance
  double activity_eps = 1e-7;   // threshold on the numerical Phi_j'(q)
  double activity_step = 1e-5;  // forward-difference step for activity
};

// Equilibrium cumulative choice strategies Phi_j(q) for a market of
// allocation curves over a common field size, together with the aggregate
// supply Q and the constant-contest partition bookkeeping.
class ChoiceProfile {
 public:
  explicit ChoiceProfile(std::vector<AllocationCurve> curves,
                         SolverOptions options = {});

  std::size_t contest_count() const { return curves_.size(); }
  int field_size() const { return curves_.front().field_size(); }
  const std::vector<AllocationCurve>& curves() const { return curves_; }
  const SolverOptions& options() const { return options_; }

  // Q(x) = sum_j x_j^{-1}(x).
  double aggregate_supply(double x) const;
  // Q^{-1}(q) = max{x in [0, x_max] : Q(x) >= q}.
  double invert_supply(double q) const;

  // Phi_j(q); constant contests follow the equal-division selection.
  double choice(std::size_t j, double q) const;
  // All Phi_j(q) sharing one market-clearing solve.
  std::vector<double> choices(double q) const;

  const std::vector<std::size_t>& decreasing_contests() const { return m2_; }
  const std::vector<std::size_t>& constant_contests() const { return m1_; }
  const std::vector<std::size_t>& top_constant_contests() const {
    return m1_star_;
  }
  std::optional<double> top_constant_value() const { return x_star_; }
  // q* = min(1, sum_{j in M2} x_j^{-1}(x*)); 1 when no constant contest
  // ever receives mass.
  double constant_onset() const { return q_star_; }

  double max_prize_level() const { return x_max_; }
  // Prize levels where Q^{-1} kinks: curve endpoints and constant values.
  const std::vector<double>& supply_kinks() const { return kinks_; }

 private:
  std::vector<AllocationCurve> curves_;
  SolverOptions options_;
  std::vector<std::size_t> m1_, m2_, m1_star_;
  std::optional<double> x_star_;
  double q_star_;
  double x_max_;
  std::vector<double> kinks_;
};

// Free-function forms used before a profile exists.
double aggregate_supply(std::span<const AllocationCurve> curves, double x);
double invert_supply(std::span<const AllocationCurve> curves, double q);

// Equilibrium effort beta_j(q); zero for constant contests and at q = 1.
double effort(const ChoiceProfile& profile, const SkillDistribution& dist,
              std::size_t j, double q);

// Interim utility v(q) x_j(Phi_j(q)) - beta_j(q).
double interim_utility(const ChoiceProfile& profile,
                       const SkillDistribution& dist, std::size_t j, double q);

// Same quantity through the integration-by-parts route
// v(1) x_j(Phi_j(1)) - int_q^1 x_j(Phi_j(t)) v'(t) dt.
double interim_utility_integrated(const ChoiceProfile& profile,
                                  const SkillDistribution& dist, std::size_t j,
                                  double q);

// Max over a q grid of the spread between the best available allocation and
// the worst allocation among numerically active contests; ~0 certifies the
// equilibrium condition.
double verify_equilibrium(const ChoiceProfile& profile, int grid_size);

// Same check against an arbitrary cumulative choice strategy.
double verify_choice_strategy(
    std::span<const AllocationCurve> curves,
    const std::function<double(std::size_t, double)>& phi, int grid_size,
    const SolverOptions& options = {});

// Disclosed-competitor effort beta_{j,k}(q); requires Phi_j(1) > 0.
double disclosed_effort(const ChoiceProfile& profile,
                        const SkillDistribution& dist, std::size_t j, int k,
                        double q);

// |E_k[x_w^{(k)}(phi/p)] - x_w(phi)| with k-1 ~ Binomial(n-1, p).
double expected_prize_identity_residual(const PrizeStructure& w, double p,
                                        double phi_level);

}  // namespace parcontest
