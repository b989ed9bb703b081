#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "parcontest/market_config.hpp"
#include "parcontest/objective.hpp"
#include "parcontest/simulation.hpp"

namespace {

using nlohmann::json;
using namespace parcontest;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitUnsupported = 3;
constexpr int kExitVerifyFailed = 4;

struct Flags {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<int> grid;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  std::optional<double> tol;
  bool disclosed = false;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

MarketConfig load_config(const Flags& flags) {
  MarketConfig config = MarketConfig::load(flags.config_path);
  if (flags.grid) {
    if (*flags.grid < 2) throw ConfigError("--grid", "must be >= 2");
    config.output_grid = *flags.grid;
  }
  if (flags.seed) config.game.seed = *flags.seed;
  if (flags.replications) {
    if (*flags.replications < 1)
      throw ConfigError("--replications", "must be >= 1");
    config.game.replications = *flags.replications;
  }
  return config;
}

void write_text(const Flags& flags, const std::string& name,
                const std::string& body) {
  std::filesystem::create_directories(flags.out_dir);
  const auto path = std::filesystem::path(flags.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

void write_report(const Flags& flags, const std::string& name, json body,
                  const MarketConfig& config) {
  body["version"] = kVersion;
  body["config"] = config.to_json();
  write_text(flags, name, body.dump(2) + "\n");
}

int cmd_solve(const Flags& flags) {
  const MarketConfig config = load_config(flags);
  ChoiceProfile profile(config.curves(), config.solver);
  const std::size_t m = profile.contest_count();

  std::string csv = "q";
  for (std::size_t j = 1; j <= m; ++j) csv += ",phi_" + std::to_string(j);
  for (std::size_t j = 1; j <= m; ++j) csv += ",beta_" + std::to_string(j);
  for (std::size_t j = 1; j <= m; ++j) csv += ",u_" + std::to_string(j);
  csv += "\n";
  for (int i = 0; i < config.output_grid; ++i) {
    const double q = static_cast<double>(i) / (config.output_grid - 1);
    csv += fmt(q);
    const auto phis = profile.choices(q);
    for (std::size_t j = 0; j < m; ++j) csv += "," + fmt(phis[j]);
    for (std::size_t j = 0; j < m; ++j)
      csv += "," + fmt(effort(profile, config.game.dist, j, q));
    for (std::size_t j = 0; j < m; ++j)
      csv += "," + fmt(interim_utility(profile, config.game.dist, j, q));
    csv += "\n";
  }
  write_text(flags, "equilibrium.csv", csv);

  json report;
  report["verify_violation"] = verify_equilibrium(profile, config.output_grid);
  report["constant_onset"] = profile.constant_onset();
  report["max_prize_level"] = profile.max_prize_level();
  write_report(flags, "equilibrium.json", std::move(report), config);
  return kExitOk;
}

int cmd_utility(const Flags& flags) {
  const MarketConfig config = load_config(flags);
  const auto curves = config.curves();
  json utilities = json::array();
  for (std::size_t j = 0; j < curves.size(); ++j) {
    const auto& objective = config.game.objectives[j];
    if (const auto* eff = std::get_if<EffortObjective>(&objective)) {
      utilities.push_back(
          effort_utility(j, curves, config.game.dist, eff->alpha,
                         config.solver));
    } else {
      const double theta = std::get<ParticipationObjective>(objective).theta;
      utilities.push_back(
          participation_utility(j, curves, theta, config.solver));
    }
  }
  write_report(flags, "utility.json", {{"utilities", utilities}}, config);
  return kExitOk;
}

int cmd_best_response(const Flags& flags) {
  const MarketConfig config = load_config(flags);
  const auto curves = config.curves();
  json responses = json::array();
  for (std::size_t j = 0; j < curves.size(); ++j) {
    const auto* obj =
        std::get_if<ParticipationObjective>(&config.game.objectives[j]);
    if (!obj)
      throw UnsupportedCaseError(
          "best-response covers participation objectives (the simple-contest "
          "characterization); for weight-monotone effort objectives the "
          "winner-take-all contest is dominant");
    std::vector<AllocationCurve> opponents;
    for (std::size_t o = 0; o < curves.size(); ++o)
      if (o != j) opponents.push_back(curves[o]);
    const BestResponse best = best_response_participation(
        opponents, obj->theta, config.game.prizes[j].budget, config.game.n,
        config.solver);
    responses.push_back({{"designer", j},
                         {"k_star", best.k},
                         {"utility", best.utility},
                         {"share", best.share},
                         {"k_in_xi_argmax", best.k_in_xi_argmax}});
  }
  write_report(flags, "best_response.json", {{"responses", responses}},
               config);
  return kExitOk;
}

int cmd_spe(const Flags& flags) {
  const MarketConfig config = load_config(flags);
  std::optional<double> theta;
  for (const auto& objective : config.game.objectives) {
    const auto* obj = std::get_if<ParticipationObjective>(&objective);
    if (!obj || (theta && *theta != obj->theta))
      throw UnsupportedCaseError(
          "spe requires every contest to carry a participation objective "
          "with one common threshold; the designers' equilibrium is only "
          "characterized for that case");
    theta = obj->theta;
  }
  std::vector<double> budgets;
  for (const auto& w : config.game.prizes) budgets.push_back(w.budget);
  const SpeSolution spe =
      solve_common_theta_spe(budgets, *theta, config.game.n, config.solver);
  json structures = json::array();
  for (const auto& w : spe.structures) structures.push_back(w.to_json());
  write_report(flags, "spe.json",
               {{"k_star", spe.k_star},
                {"clearing_level", spe.clearing_level},
                {"shares", spe.shares},
                {"utilities", spe.utilities},
                {"structures", structures},
                {"unique_max_budget_case", spe.unique_max_budget_case},
                {"max_deviation_gain", spe.max_deviation_gain}},
               config);
  return kExitOk;
}

json report_with_csv(const Flags& flags, const SimulationReport& report) {
  std::string designers = "contest,utility_mean,utility_half_width,"
                          "participation_mean,participation_half_width\n";
  for (std::size_t j = 0; j < report.designer_utility.size(); ++j) {
    designers += std::to_string(j + 1) + "," +
                 fmt(report.designer_utility[j].mean) + "," +
                 fmt(report.designer_utility[j].half_width) + "," +
                 fmt(report.participation[j].mean) + "," +
                 fmt(report.participation[j].half_width) + "\n";
  }
  write_text(flags, "designers.csv", designers);
  std::string probes = "q,utility_mean,utility_half_width\n";
  for (std::size_t i = 0; i < report.probe_quantiles.size(); ++i) {
    probes += fmt(report.probe_quantiles[i]) + "," +
              fmt(report.contestant_utility[i].mean) + "," +
              fmt(report.contestant_utility[i].half_width) + "\n";
  }
  write_text(flags, "contestants.csv", probes);
  return report.to_json();
}

int cmd_simulate(const Flags& flags) {
  const MarketConfig config = load_config(flags);
  ChoiceProfile profile(config.curves(), config.solver);
  Simulator simulator(config.game, profile);
  const SimulationReport report =
      flags.disclosed ? simulator.run_disclosed() : simulator.run();
  write_report(flags, "simulate.json",
               {{"report", report_with_csv(flags, report)}}, config);
  return kExitOk;
}

int cmd_verify(const Flags& flags) {
  const MarketConfig config = load_config(flags);
  ChoiceProfile profile(config.curves(), config.solver);
  const double violation = verify_equilibrium(profile, config.output_grid);
  Simulator simulator(config.game, profile);
  const double gap = simulator.best_response_gap();
  const double tol = flags.tol.value_or(1e-6);
  const double gap_tol = 0.01;
  const bool ok = violation <= tol && gap <= gap_tol;
  write_report(flags, "verify.json",
               {{"verify_violation", violation},
                {"best_response_gap", gap},
                {"tolerance", tol},
                {"gap_tolerance", gap_tol},
                {"passed", ok}},
               config);
  return ok ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel rank-order contest solver"};
  app.require_subcommand(1);

  Flags flags;
  int (*handler)(const Flags&) = nullptr;
  auto add = [&](const std::string& name, const std::string& help,
                 int (*fn)(const Flags&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", flags.config_path, "market config JSON")
        ->required();
    sub->add_option("--out", flags.out_dir, "output directory");
    sub->add_option("--grid", flags.grid, "q-grid size for outputs");
    sub->add_option("--seed", flags.seed, "master seed override");
    sub->add_option("--replications", flags.replications,
                    "replication count override");
    sub->add_option("--tol", flags.tol, "verification tolerance");
    if (name == "simulate")
      sub->add_flag("--disclosed", flags.disclosed,
                    "run the disclosed-competitor variant");
    sub->callback([&handler, fn] { handler = fn; });
    return sub;
  };
  add("solve", "solve the contestant equilibrium", cmd_solve);
  add("utility", "designer utilities under the equilibrium", cmd_utility);
  add("best-response", "optimal simple contest per designer",
      cmd_best_response);
  add("spe", "designers' common-threshold equilibrium", cmd_spe);
  add("simulate", "Monte-Carlo oracle run", cmd_simulate);
  add("verify", "equilibrium + best-response-gap certification", cmd_verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    return handler(flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnsupportedCaseError& e) {
    std::cerr << "unsupported case: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
