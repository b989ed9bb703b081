#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace parcontest {

// Skill distribution F represented through its quantile map
// v(q) = F^{-1}(1 - q), extended with v(q) = 0 for q > 1.
// Lower quantile means higher skill; v is strictly decreasing on [0,1].
class SkillDistribution {
 public:
  enum class Family { kUniform, kExponential, kPower, kPiecewiseLinear };

  static SkillDistribution uniform(double low, double high);
  static SkillDistribution exponential(double rate);
  static SkillDistribution power(double exponent, double scale);
  // Knots are (quantile, skill) pairs; quantiles strictly increasing from 0
  // to 1, skills strictly decreasing.
  static SkillDistribution piecewise_linear(
      std::vector<std::pair<double, double>> knots);

  Family family() const { return family_; }
  std::string family_name() const;

  // v(q). Returns 0 for q > 1. May return +inf at q = 0 for families with
  // unbounded support (exponential).
  double quantile_skill(double q) const;

  // dv/dq, 0 for q > 1. Used by the integration-by-parts utility route.
  double skill_slope(double q) const;

  // F(x), clamped to [0,1]. Round-trip: cdf(quantile_skill(q)) == 1 - q.
  double cdf(double x) const;

  // Interior quantiles where v' jumps (piecewise-linear knots); empty for
  // smooth families. Quadratures subdivide at these points.
  std::vector<double> quantile_breakpoints() const;

  nlohmann::json to_json() const;
  static SkillDistribution from_json(const nlohmann::json& j);

 private:
  SkillDistribution(Family family, std::vector<double> params,
                    std::vector<std::pair<double, double>> knots);

  Family family_;
  std::vector<double> params_;
  std::vector<std::pair<double, double>> knots_;
};

// Deterministic U[0,1] quantile sampling; same seed gives the same list.
std::vector<double> sample_quantiles(std::uint64_t seed, std::size_t count);

}  // namespace parcontest
