#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "parcontest/simulation.hpp"

namespace parcontest {

inline constexpr const char* kVersion = "0.1.0";

// Malformed or inconsistent configuration input (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Valid input outside the analytic scope (CLI exit code 3).
class UnsupportedCaseError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Declarative market description parsed from a JSON config document.
struct MarketConfig {
  GameConfig game;
  SolverOptions solver;
  int output_grid = 101;
  double sc_tol = 1e-9;

  static MarketConfig from_json(const nlohmann::json& doc);
  static MarketConfig load(const std::string& path);

  // Fully resolved document (defaults filled in); parse(serialize) is
  // idempotent.
  nlohmann::json to_json() const;

  std::vector<AllocationCurve> curves() const;
};

}  // namespace parcontest
