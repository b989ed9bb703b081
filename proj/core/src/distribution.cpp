#include "parcontest/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace parcontest {

namespace {

void check(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

SkillDistribution::SkillDistribution(
    Family family, std::vector<double> params,
    std::vector<std::pair<double, double>> knots)
    : family_(family), params_(std::move(params)), knots_(std::move(knots)) {}

SkillDistribution SkillDistribution::uniform(double low, double high) {
  check(std::isfinite(low) && std::isfinite(high), "uniform: non-finite bound");
  check(low >= 0.0, "uniform: low must be nonnegative");
  check(high > low, "uniform: high must exceed low");
  return {Family::kUniform, {low, high}, {}};
}

SkillDistribution SkillDistribution::exponential(double rate) {
  check(std::isfinite(rate) && rate > 0.0, "exponential: rate must be positive");
  return {Family::kExponential, {rate}, {}};
}

SkillDistribution SkillDistribution::power(double exponent, double scale) {
  check(std::isfinite(exponent) && exponent > 0.0,
        "power: exponent must be positive");
  check(std::isfinite(scale) && scale > 0.0, "power: scale must be positive");
  return {Family::kPower, {exponent, scale}, {}};
}

SkillDistribution SkillDistribution::piecewise_linear(
    std::vector<std::pair<double, double>> knots) {
  check(knots.size() >= 2, "piecewise-linear: need at least two knots");
  check(knots.front().first == 0.0 && knots.back().first == 1.0,
        "piecewise-linear: knot quantiles must span [0,1]");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    check(std::isfinite(knots[i].first) && std::isfinite(knots[i].second),
          "piecewise-linear: non-finite knot");
    check(knots[i].second >= 0.0, "piecewise-linear: negative skill value");
    if (i > 0) {
      check(knots[i].first > knots[i - 1].first,
            "piecewise-linear: knot quantiles must be strictly increasing");
      check(knots[i].second < knots[i - 1].second,
            "piecewise-linear: skill values must be strictly decreasing");
    }
  }
  return {Family::kPiecewiseLinear, {}, std::move(knots)};
}

std::string SkillDistribution::family_name() const {
  switch (family_) {
    case Family::kUniform: return "uniform";
    case Family::kExponential: return "exponential";
    case Family::kPower: return "power";
    case Family::kPiecewiseLinear: return "piecewise-linear";
  }
  return "?";
}

double SkillDistribution::quantile_skill(double q) const {
  if (q < 0.0) throw std::domain_error("quantile_skill: q < 0");
  if (q > 1.0) return 0.0;
  switch (family_) {
    case Family::kUniform:
      return params_[0] + (1.0 - q) * (params_[1] - params_[0]);
    case Family::kExponential:
      return q == 0.0 ? std::numeric_limits<double>::infinity()
                      : -std::log(q) / params_[0];
    case Family::kPower:
      return params_[1] * std::pow(1.0 - q, 1.0 / params_[0]);
    case Family::kPiecewiseLinear: {
      auto it = std::lower_bound(
          knots_.begin(), knots_.end(), q,
          [](const auto& knot, double value) { return knot.first < value; });
      if (it == knots_.begin()) return it->second;
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double t = (q - lo.first) / (hi.first - lo.first);
      return lo.second + t * (hi.second - lo.second);
    }
  }
  return 0.0;
}

double SkillDistribution::skill_slope(double q) const {
  if (q < 0.0) throw std::domain_error("skill_slope: q < 0");
  if (q > 1.0) return 0.0;
  switch (family_) {
    case Family::kUniform:
      return params_[0] - params_[1];
    case Family::kExponential:
      return q == 0.0 ? -std::numeric_limits<double>::infinity()
                      : -1.0 / (params_[0] * q);
    case Family::kPower: {
      const double a = params_[0];
      if (q == 1.0 && a > 1.0) return 0.0;
      return -params_[1] / a * std::pow(1.0 - q, 1.0 / a - 1.0);
    }
    case Family::kPiecewiseLinear: {
      auto it = std::upper_bound(
          knots_.begin(), knots_.end(), q,
          [](double value, const auto& knot) { return value < knot.first; });
      if (it == knots_.end()) it = knots_.end() - 1;
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      return (hi.second - lo.second) / (hi.first - lo.first);
    }
  }
  return 0.0;
}

double SkillDistribution::cdf(double x) const {
  switch (family_) {
    case Family::kUniform: {
      const double p = (x - params_[0]) / (params_[1] - params_[0]);
      return std::clamp(p, 0.0, 1.0);
    }
    case Family::kExponential:
      return x <= 0.0 ? 0.0 : 1.0 - std::exp(-params_[0] * x);
    case Family::kPower: {
      if (x <= 0.0) return 0.0;
      if (x >= params_[1]) return 1.0;
      return std::pow(x / params_[1], params_[0]);
    }
    case Family::kPiecewiseLinear: {
      // v maps [0,1] onto [v(1), v(0)] decreasingly; F(x) = 1 - v^{-1}(x).
      if (x >= knots_.front().second) return 1.0;
      if (x <= knots_.back().second) return 0.0;
      auto it = std::lower_bound(
          knots_.begin(), knots_.end(), x,
          [](const auto& knot, double value) { return knot.second > value; });
      const auto& hi = *it;        // first knot with value <= x
      const auto& lo = *(it - 1);  // value > x
      const double t = (lo.second - x) / (lo.second - hi.second);
      const double q = lo.first + t * (hi.first - lo.first);
      return 1.0 - q;
    }
  }
  return 0.0;
}

std::vector<double> SkillDistribution::quantile_breakpoints() const {
  std::vector<double> out;
  if (family_ == Family::kPiecewiseLinear) {
    for (std::size_t i = 1; i + 1 < knots_.size(); ++i)
      out.push_back(knots_[i].first);
  }
  return out;
}

nlohmann::json SkillDistribution::to_json() const {
  nlohmann::json params;
  switch (family_) {
    case Family::kUniform:
      params = {{"low", params_[0]}, {"high", params_[1]}};
      break;
    case Family::kExponential:
      params = {{"rate", params_[0]}};
      break;
    case Family::kPower:
      params = {{"exponent", params_[0]}, {"scale", params_[1]}};
      break;
    case Family::kPiecewiseLinear: {
      nlohmann::json knots = nlohmann::json::array();
      for (const auto& [q, v] : knots_) knots.push_back({q, v});
      params = {{"knots", knots}};
      break;
    }
  }
  return {{"family", family_name()}, {"params", params}};
}

SkillDistribution SkillDistribution::from_json(const nlohmann::json& j) {
  const std::string family = j.at("family").get<std::string>();
  const nlohmann::json& p = j.at("params");
  if (family == "uniform")
    return uniform(p.at("low").get<double>(), p.at("high").get<double>());
  if (family == "exponential") return exponential(p.at("rate").get<double>());
  if (family == "power")
    return power(p.at("exponent").get<double>(), p.at("scale").get<double>());
  if (family == "piecewise-linear") {
    std::vector<std::pair<double, double>> knots;
    for (const auto& knot : p.at("knots"))
      knots.emplace_back(knot.at(0).get<double>(), knot.at(1).get<double>());
    return piecewise_linear(std::move(knots));
  }
  throw std::invalid_argument("unknown distribution family: " + family);
}

std::vector<double> sample_quantiles(std::uint64_t seed, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  // splitmix64; platform-independent and stable across standard libraries.
  std::uint64_t state = seed;
  for (std::size_t i = 0; i < count; ++i) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    out.push_back(static_cast<double>(z >> 11) * 0x1.0p-53);
  }
  return out;
}

}  // namespace parcontest
