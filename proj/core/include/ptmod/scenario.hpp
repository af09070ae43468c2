#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ptmod/pso.hpp"

namespace ptmod {

// A complete experiment description as read from a JSON config file.
struct ScenarioConfig {
  std::string name = "scenario";
  double extent_km = 0.0;  // region radius, informational
  PotentialNetwork network;
  std::vector<ZoneSpec> zones;
  PTConfig cfg;
  PartitionParams partition;
  InstanceParams instance;
  LnsParams lns;
  PsoParams pso;
  double horizon_min = 180.0;
  int initial_buses = 25;
  double latest_anchor_prob = 0.5;
  double min_slack_min = 2.0;
  double gamma = 1.5;
  int users = 1000;
  std::vector<double> gamma_schedule = {1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0};
  std::vector<int> demand_sizes = {100, 500, 1000, 5000, 10000};
  std::uint64_t seed = 1;
};

// Collects every violation instead of stopping at the first.
std::vector<std::string> validate_scenario(const ScenarioConfig& sc);

ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);  // throws with all violations listed

// All potential stops active, the initial bus pool spread over lines
// proportionally to end-to-end time, then clamped into the fleet bounds.
Layout initial_layout(const ScenarioConfig& sc);

struct LineChange {
  int line = 0;
  double skipped_fraction = 0.0;   // inactive potential stops / potential stops
  double bus_reduction = 0.0;      // (N0 - N*) / N0, clamped into [0, 1]
  int vehicles_before = 0;
  int vehicles_after = 0;
  int riders = 0;  // users whose fixed-route path touches the line
};

struct RunReport {
  std::string scenario_id;
  double gamma = 0.0;
  int users = 0;
  std::uint64_t seed = 0;
  double initial_cost = 0.0;
  double best_cost = 0.0;
  EvalRecord best;
  std::array<double, 5> mode_shares{};  // Walk, Pt, Rs, WalkPtRs, RsPtWalk
  std::vector<LineChange> line_changes;
  std::vector<TraceRow> trace;
  std::vector<double> gbest_per_epoch;
};

// Demand generation and evaluation context for one (gamma, users, seed) cell.
EvalContext make_context(const ScenarioConfig& sc, double gamma, int users);

// One full bilevel optimization; `warm` overrides the swarm seed layout.
RunReport run_single(const ScenarioConfig& sc, double gamma, int users,
                     const std::optional<Layout>& warm = std::nullopt);

// Warm-started sweep over the gamma schedule at the configured user count.
std::vector<RunReport> gamma_sweep(const ScenarioConfig& sc);

// Independent runs over the demand sizes at the configured gamma.
std::vector<RunReport> demand_sweep(const ScenarioConfig& sc);

// costs.csv, mode_shares.csv, layout_changes.csv, trace.csv under out_dir.
void emit_reports(const std::vector<RunReport>& reports, const std::string& out_dir);

// Classification dump for the initial layout: one row per request.
void write_partition_csv(const ScenarioConfig& sc, std::ostream& os);

// Digest of a previously written out_dir, one summary line per run.
std::string summarize_reports(const std::string& in_dir);

std::string format_fixed(double v);  // 4-decimal fixed point used in all CSVs

}  // namespace ptmod
