#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ptmod/rng.hpp"
#include "ptmod/rs_windows.hpp"

namespace ptmod {

struct Visit {
  int node = 0;  // node id
  double arrival = 0.0;
  double departure = 0.0;  // max(arrival, earliest) + service
  int load_after = 0;
};

// One feeder vehicle tour; the depot at both ends is implicit.
struct Route {
  std::vector<Visit> visits;
};

double route_km(const Route& r, const RSInstance& inst);

struct RouteCheck {
  bool feasible = true;
  std::string violation;  // first violation found, empty when feasible
};

// Recomputes the schedule from the visit order and checks time windows,
// capacity, pairing and precedence of the served requests.
RouteCheck route_feasible(const Route& r, const RSInstance& inst);

struct RSSolution {
  std::vector<Route> routes;  // every route non-empty
  std::unordered_map<int, std::pair<int, int>> chosen;  // request id -> (pickup, dropoff) node
  std::vector<int> unassigned;  // request ids, ascending
  double total_km = 0.0;

  int fleet_size() const { return static_cast<int>(routes.size()); }
};

// Lexicographic objective: vehicles first, kilometres second.
double vehicle_weight(const RSInstance& inst);
double solution_cost(const RSSolution& s, double w_veh);

// Audits pairing coverage, per-route feasibility and the km bookkeeping.
// Returns an empty list when the solution is sound.
std::vector<std::string> solution_violations(const RSSolution& s, const RSInstance& inst);

enum class RemovalOp { Random, Worst, Related };

// Removes q requests (both visits each) from a copy of the solution and
// returns it along with the removal pool, empty routes purged.
struct PartialSolution {
  RSSolution solution;
  std::vector<int> pool;
};
PartialSolution destroy(const RSSolution& s, int q, RemovalOp op, const RSInstance& inst, Rng& rng);

// Greedy best insertion of the pool over all routes, positions and node
// alternatives; opens a fresh vehicle when that is cheaper than any insertion
// into existing routes (vehicle opening priced at w_veh).
RSSolution repair(const PartialSolution& partial, const RSInstance& inst, double w_veh);

// Seed solution: requests by window tightness, cheapest feasible insertion.
RSSolution greedy_initial(const RSInstance& inst, std::uint64_t seed);

struct LnsParams {
  int iterations = 2000;
  double removal_min_share = 0.10;  // of currently assigned requests
  double removal_max_share = 0.30;
  int removal_cap = 60;             // keeps repair cost bounded on large instances
  double accept_worse_frac = 0.05;  // degradation accepted with p=1/2 at the start
  double end_temp_ratio = 1e-3;
  std::uint64_t seed = 1;
};

RSSolution lns_solve(const RSInstance& inst, const LnsParams& params);

}  // namespace ptmod
