#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ptmod/demand.hpp"
#include "ptmod/pt_network.hpp"

namespace ptmod {

enum class NodeKind { Depot, Origin, Destination, Transfer };

struct RSNode {
  int id = 0;
  NodeKind kind = NodeKind::Depot;
  Point location;
  double earliest = 0.0;
  double latest = 0.0;
  double service_min = 0.0;
  int owner = -1;  // request id, -1 for the depot
  int stop = -1;   // global stop id for transfer nodes
};

// One feeder request: the vehicle must serve exactly one pickup alternative
// and exactly one dropoff alternative, pickup first, same vehicle.
struct RSRequest {
  int request_id = 0;
  std::vector<int> pickups;   // node ids
  std::vector<int> dropoffs;  // node ids
};

struct RSInstance {
  std::vector<RSNode> nodes;  // nodes[0] is the depot
  std::vector<RSRequest> requests;
  int capacity = 4;
  double car_speed_kmh = 30.0;
  double car_circuity = 1.255;
  std::unordered_map<int, int> index_of;  // node id -> index

  const RSNode& node(int id) const { return nodes[static_cast<std::size_t>(index_of.at(id))]; }
  bool is_depot(int id) const { return node(id).kind == NodeKind::Depot; }
  // depot legs cost nothing in either time or distance
  double leg_km(int a, int b) const;
  double leg_min(int a, int b) const;
  int owner_of(int id) const { return node(id).owner; }
  const RSRequest& request_of(int request_id) const;
};

// Latest feeder dropoff time at stop `stop` that still lets the user reach
// `dest` by `latest_arrival` via fixed route plus egress walk; nullopt when no
// egress stop is walk-reachable and connected.
std::optional<double> latest_departure_at(int stop, const Point& dest, double latest_arrival,
                                          const PTGraph& g, const PairTimeMatrix& times,
                                          double max_walk_km, const PTConfig& cfg);

// Earliest feeder pickup time at stop `stop` for a user leaving `origin` at
// `earliest_departure` via ingress walk plus fixed route.
std::optional<double> earliest_arrival_at(const Point& origin, int stop, double earliest_departure,
                                          const PTGraph& g, const PairTimeMatrix& times,
                                          double max_walk_km, const PTConfig& cfg);

struct InstanceParams {
  int capacity = 4;
  double service_min = 1.0;
  double horizon_min = 180.0;
  int k_transfer = 5;        // transfer alternatives per mixed request end
  double max_walk_km = 2.52;
};

struct BuiltInstance {
  RSInstance instance;
  PartitionedDemand partition;  // with unworkable mixed requests demoted to pure feeder
  int demoted = 0;
};

// Expands the feeder-involved demand into a dial-a-ride instance. Pure feeder
// requests get one origin and one destination node; mixed requests get
// transfer alternatives with windows derived from the fixed-route timetable.
// Mixed requests whose every alternative is unworkable are demoted to pure
// feeder service (the returned partition reflects that).
BuiltInstance build_instance(const PartitionedDemand& classes,
                             const std::vector<TravelRequest>& requests, const PTGraph& g,
                             const PairTimeMatrix& times, const InstanceParams& params,
                             const PTConfig& cfg);

// Plain text round-trip of an instance, stable across runs.
void dump_instance(const RSInstance& inst, std::ostream& os);
RSInstance load_instance(std::istream& is);

}  // namespace ptmod
