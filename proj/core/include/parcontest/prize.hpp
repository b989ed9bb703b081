#pragma once

#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace parcontest {

// Rank-order prize vector w_1 >= ... >= w_n >= 0 with sum(w) <= budget.
struct PrizeStructure {
  std::vector<double> weights;
  double budget = 0.0;

  PrizeStructure(std::vector<double> weights, double budget);

  // Simple contest: budget split equally over the top k ranks.
  static PrizeStructure simple(int k, double budget, int n);

  int field_size() const { return static_cast<int>(weights.size()); }
  double total() const;
  bool is_simple() const;

  nlohmann::json to_json() const;
};

// Evaluates sum_{k=1..n} coeff[k-1] * C(n-1,k-1) phi^{k-1} (1-phi)^{n-k}
// by term recurrence; raw binomial coefficients are never formed.
double binomial_mixture(std::span<const double> coeff, double phi);

// Interim allocation curve x_w(phi): expected prize for a contestant who is
// outranked with probability phi by each of the n-1 opponents.
class AllocationCurve {
 public:
  explicit AllocationCurve(PrizeStructure prizes);

  const PrizeStructure& prizes() const { return prizes_; }
  int field_size() const { return prizes_.field_size(); }
  bool is_constant() const { return is_constant_; }
  double top() const { return prizes_.weights.front(); }     // x_w(0)
  double bottom() const { return prizes_.weights.back(); }   // x_w(1)
  double mean() const { return mean_; }  // integral_0^1 x_w = sum(w)/n

  double value(double phi) const;
  double derivative(double phi) const;  // <= 0; identically 0 iff constant

  // Generalized inverse max{phi in [0,1] : x_w(phi) >= x}; total on x >= 0.
  double invert(double x) const;

 private:
  PrizeStructure prizes_;
  std::vector<double> derivative_coeff_;  // w_k - w_{k+1}, length n-1
  std::vector<double> table_;             // x_w at uniform phi grid
  bool is_constant_;
  double mean_;
};

// Unit-budget simple contest allocation xi_k(phi).
double xi(int k, int n, double phi);

// Conditional allocation x_w^{(k)}(phi): expected prize given exactly k
// participants, each opponent outranking with probability phi.
double conditional_allocation(const PrizeStructure& w, int k, double phi);

// d/dphi of x_w^{(k)}(phi); 0 for k = 1.
double conditional_allocation_derivative(const PrizeStructure& w, int k,
                                         double phi);

// f single-crossing w.r.t. g on a shared grid: all deviations above +tol
// occur before all deviations below -tol.
bool single_crossing(std::span<const double> f, std::span<const double> g,
                     double tol);

// Definition-4 dominance: integral order (exact, via budgets), curve
// single-crossing, and negative-derivative single-crossing on a grid.
bool single_crossing_dominates(const AllocationCurve& a,
                               const AllocationCurve& b, int grid = 2049,
                               double tol = 1e-9);

}  // namespace parcontest
