#include "parcontest/market_config.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace parcontest {

namespace {

using nlohmann::json;

const json& field(const json& doc, const std::string& name,
                  const std::string& path) {
  auto it = doc.find(name);
  if (it == doc.end()) throw ConfigError(path, "missing required field");
  return *it;
}

double number_at(const json& doc, const std::string& name,
                 const std::string& path, double fallback,
                 bool required = false) {
  auto it = doc.find(name);
  if (it == doc.end()) {
    if (required) throw ConfigError(path, "missing required field");
    return fallback;
  }
  if (!it->is_number()) throw ConfigError(path, "expected a number");
  return it->get<double>();
}

DesignerObjective parse_objective(const json& doc, const std::string& path,
                                  int n) {
  if (!doc.is_object()) throw ConfigError(path, "expected an object");
  const std::string type =
      field(doc, "type", path + ".type").get<std::string>();
  if (type == "effort") {
    const json& raw = field(doc, "alpha", path + ".alpha");
    if (!raw.is_array() || static_cast<int>(raw.size()) != n)
      throw ConfigError(path + ".alpha", "expected an array of length n");
    EffortObjective objective;
    for (const auto& a : raw) {
      if (!a.is_number())
        throw ConfigError(path + ".alpha", "expected numeric entries");
      objective.alpha.push_back(a.get<double>());
      if (!std::isfinite(objective.alpha.back()))
        throw ConfigError(path + ".alpha", "entries must be finite");
    }
    return objective;
  }
  if (type == "participation") {
    const double theta = number_at(doc, "theta", path + ".theta", 0.0, true);
    if (!(theta >= 0.0 && theta <= 1.0))
      throw ConfigError(path + ".theta", "theta must lie in [0,1]");
    return ParticipationObjective{theta};
  }
  throw ConfigError(path + ".type",
                    "unknown objective type '" + type +
                        "' (expected 'effort' or 'participation')");
}

json objective_to_json(const DesignerObjective& objective) {
  if (const auto* eff = std::get_if<EffortObjective>(&objective))
    return {{"type", "effort"}, {"alpha", eff->alpha}};
  return {{"type", "participation"},
          {"theta", std::get<ParticipationObjective>(objective).theta}};
}

}  // namespace

MarketConfig MarketConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("$", "config must be a JSON object");
  MarketConfig out;

  const json& n_raw = field(doc, "n", "n");
  if (!n_raw.is_number_integer() || n_raw.get<int>() < 1)
    throw ConfigError("n", "expected an integer >= 1");
  out.game.n = n_raw.get<int>();

  try {
    out.game.dist =
        SkillDistribution::from_json(field(doc, "distribution", "distribution"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("distribution", e.what());
  }

  const json& contests = field(doc, "contests", "contests");
  if (!contests.is_array() || contests.empty())
    throw ConfigError("contests", "expected a non-empty array");
  for (std::size_t j = 0; j < contests.size(); ++j) {
    const std::string path = "contests[" + std::to_string(j) + "]";
    const json& contest = contests[j];
    if (!contest.is_object()) throw ConfigError(path, "expected an object");
    const double budget = number_at(contest, "budget", path + ".budget", 0.0,
                                    true);
    const bool has_prizes = contest.contains("prizes");
    const bool has_simple = contest.contains("simple");
    if (has_prizes == has_simple)
      throw ConfigError(path, "give exactly one of 'prizes' or 'simple'");
    try {
      if (has_simple) {
        const json& simple = contest["simple"];
        if (!simple.is_object() || !simple.contains("k") ||
            !simple["k"].is_number_integer())
          throw ConfigError(path + ".simple.k", "expected an integer");
        out.game.prizes.push_back(PrizeStructure::simple(
            simple["k"].get<int>(), budget, out.game.n));
      } else {
        const json& raw = contest["prizes"];
        if (!raw.is_array() || static_cast<int>(raw.size()) != out.game.n)
          throw ConfigError(path + ".prizes",
                            "expected an array of length n");
        std::vector<double> weights;
        for (const auto& w : raw) {
          if (!w.is_number())
            throw ConfigError(path + ".prizes", "expected numeric entries");
          weights.push_back(w.get<double>());
        }
        out.game.prizes.emplace_back(std::move(weights), budget);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(path, e.what());
    }
    out.game.objectives.push_back(parse_objective(
        field(contest, "objective", path + ".objective"),
        path + ".objective", out.game.n));
  }

  if (doc.contains("solver")) {
    const json& solver = doc["solver"];
    if (!solver.is_object()) throw ConfigError("solver", "expected an object");
    out.solver.bisect_tol = number_at(solver, "bisect_tol",
                                      "solver.bisect_tol",
                                      out.solver.bisect_tol);
    out.solver.quad_tol =
        number_at(solver, "quad_tol", "solver.quad_tol", out.solver.quad_tol);
    out.solver.activity_eps = number_at(
        solver, "activity_eps", "solver.activity_eps", out.solver.activity_eps);
    out.sc_tol = number_at(solver, "sc_tol", "solver.sc_tol", out.sc_tol);
    const double grid =
        number_at(solver, "grid", "solver.grid", out.output_grid);
    if (grid < 2 || grid != std::floor(grid))
      throw ConfigError("solver.grid", "expected an integer >= 2");
    out.output_grid = static_cast<int>(grid);
    if (!(out.solver.bisect_tol > 0.0 && out.solver.quad_tol > 0.0 &&
          out.solver.activity_eps > 0.0 && out.sc_tol > 0.0))
      throw ConfigError("solver", "tolerances must be positive");
  }

  if (doc.contains("simulation")) {
    const json& sim = doc["simulation"];
    if (!sim.is_object())
      throw ConfigError("simulation", "expected an object");
    const double reps = number_at(sim, "replications",
                                  "simulation.replications",
                                  static_cast<double>(out.game.replications));
    if (reps < 1 || reps != std::floor(reps))
      throw ConfigError("simulation.replications",
                        "expected an integer >= 1");
    out.game.replications = static_cast<std::size_t>(reps);
    if (sim.contains("seed")) {
      if (!sim["seed"].is_number_integer())
        throw ConfigError("simulation.seed", "expected an integer");
      out.game.seed = sim["seed"].get<std::uint64_t>();
    }
    if (sim.contains("probe_quantiles")) {
      const json& probes = sim["probe_quantiles"];
      if (!probes.is_array() || probes.empty())
        throw ConfigError("simulation.probe_quantiles",
                          "expected a non-empty array");
      out.game.probe_quantiles.clear();
      for (const auto& p : probes) {
        if (!p.is_number() || p.get<double>() < 0.0 || p.get<double>() > 1.0)
          throw ConfigError("simulation.probe_quantiles",
                            "entries must lie in [0,1]");
        out.game.probe_quantiles.push_back(p.get<double>());
      }
    }
    const double grid = number_at(sim, "effort_grid",
                                  "simulation.effort_grid",
                                  out.game.effort_grid);
    if (grid < 2 || grid != std::floor(grid))
      throw ConfigError("simulation.effort_grid", "expected an integer >= 2");
    out.game.effort_grid = static_cast<int>(grid);
    const double threads = number_at(sim, "threads", "simulation.threads",
                                     out.game.threads);
    if (threads < 1 || threads != std::floor(threads))
      throw ConfigError("simulation.threads", "expected an integer >= 1");
    out.game.threads = static_cast<int>(threads);
  }

  return out;
}

MarketConfig MarketConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$", "cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  return from_json(doc);
}

nlohmann::json MarketConfig::to_json() const {
  json contests = json::array();
  for (std::size_t j = 0; j < game.prizes.size(); ++j) {
    contests.push_back({{"budget", game.prizes[j].budget},
                        {"prizes", game.prizes[j].weights},
                        {"objective", objective_to_json(game.objectives[j])}});
  }
  return {{"n", game.n},
          {"distribution", game.dist.to_json()},
          {"contests", contests},
          {"solver",
           {{"bisect_tol", solver.bisect_tol},
            {"quad_tol", solver.quad_tol},
            {"activity_eps", solver.activity_eps},
            {"sc_tol", sc_tol},
            {"grid", output_grid}}},
          {"simulation",
           {{"replications", game.replications},
            {"seed", game.seed},
            {"probe_quantiles", game.probe_quantiles},
            {"effort_grid", game.effort_grid},
            {"threads", game.threads}}}};
}

std::vector<AllocationCurve> MarketConfig::curves() const {
  std::vector<AllocationCurve> out;
  out.reserve(game.prizes.size());
  for (const auto& w : game.prizes) out.emplace_back(w);
  return out;
}

}  // namespace parcontest
