#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ptmod/scenario.hpp"

namespace {

void apply_overrides(ptmod::ScenarioConfig& sc, const std::optional<double>& gamma,
                     const std::optional<int>& users, const std::optional<std::uint64_t>& seed) {
  if (gamma) sc.gamma = *gamma;
  if (users) sc.users = *users;
  if (seed) sc.seed = *seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bilevel transit network redesign with a ride-sharing feeder"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string sweep_kind;
  std::string report_dir;
  std::optional<double> gamma;
  std::optional<int> users;
  std::optional<std::uint64_t> seed;

  auto* solve = app.add_subcommand("solve", "optimize one scenario");
  solve->add_option("--config", config_path, "scenario JSON")->required();
  solve->add_option("--gamma", gamma, "tolerance multiplier override");
  solve->add_option("--users", users, "demand size override");
  solve->add_option("--seed", seed, "seed override");
  solve->add_option("--out", out_dir, "output directory");

  auto* sweep = app.add_subcommand("sweep", "run a gamma or demand sweep");
  sweep->add_option("--config", config_path, "scenario JSON")->required();
  sweep->add_option("--kind", sweep_kind, "gamma|demand")
      ->required()
      ->check(CLI::IsMember({"gamma", "demand"}));
  sweep->add_option("--seed", seed, "seed override");
  sweep->add_option("--out", out_dir, "output directory");

  auto* partition = app.add_subcommand("partition", "dump the demand split for the initial layout");
  partition->add_option("--config", config_path, "scenario JSON")->required();
  partition->add_option("--gamma", gamma, "tolerance multiplier override");
  partition->add_option("--users", users, "demand size override");
  partition->add_option("--seed", seed, "seed override");

  auto* report = app.add_subcommand("report", "summarize a previous run directory");
  report->add_option("--in", report_dir, "directory with costs.csv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      ptmod::ScenarioConfig sc = ptmod::load_scenario(config_path);
      apply_overrides(sc, gamma, users, seed);
      const auto rep = ptmod::run_single(sc, sc.gamma, sc.users);
      ptmod::emit_reports({rep}, out_dir);
      std::cout << rep.scenario_id << ": cost " << ptmod::format_fixed(rep.initial_cost) << " -> "
                << ptmod::format_fixed(rep.best_cost) << ", feeder=" << rep.best.feeder_vehicles
                << ", fixed=" << rep.best.fixed_vehicles
                << ", km=" << ptmod::format_fixed(rep.best.feeder_km) << "\n"
                << "reports written to " << out_dir << "\n";
    } else if (sweep->parsed()) {
      ptmod::ScenarioConfig sc = ptmod::load_scenario(config_path);
      apply_overrides(sc, std::nullopt, std::nullopt, seed);
      const auto reports =
          sweep_kind == "gamma" ? ptmod::gamma_sweep(sc) : ptmod::demand_sweep(sc);
      ptmod::emit_reports(reports, out_dir);
      for (const auto& rep : reports)
        std::cout << rep.scenario_id << ": cost " << ptmod::format_fixed(rep.initial_cost)
                  << " -> " << ptmod::format_fixed(rep.best_cost) << "\n";
      std::cout << "reports written to " << out_dir << "\n";
    } else if (partition->parsed()) {
      ptmod::ScenarioConfig sc = ptmod::load_scenario(config_path);
      apply_overrides(sc, gamma, users, seed);
      ptmod::write_partition_csv(sc, std::cout);
    } else if (report->parsed()) {
      std::cout << ptmod::summarize_reports(report_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
