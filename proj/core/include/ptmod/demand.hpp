#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ptmod/config.hpp"
#include "ptmod/pt_network.hpp"

namespace ptmod {

// A door-to-door trip wish. The anchor fixes one end of the service window:
// either the earliest possible departure or the latest tolerated arrival; the
// window length is the tolerance (maximum ride time) M.
struct TravelRequest {
  enum class Anchor { EarliestDeparture, LatestArrival };

  int id = 0;  // 1-based and contiguous within a demand set
  Point origin;
  Point destination;
  Anchor anchor = Anchor::EarliestDeparture;
  double anchor_min = 0.0;
  double tolerance_min = 0.0;  // M

  double earliest_departure() const {
    return anchor == Anchor::EarliestDeparture ? anchor_min : anchor_min - tolerance_min;
  }
  double latest_arrival() const {
    return anchor == Anchor::EarliestDeparture ? anchor_min + tolerance_min : anchor_min;
  }
};

// Annular zone with shares of trip ends falling into it.
struct ZoneSpec {
  std::string name;
  double r_inner_km = 0.0;
  double r_outer_km = 0.0;
  double origin_share = 1.0;
  double destination_share = 1.0;
};

struct DemandParams {
  double horizon_min = 180.0;
  double gamma = 1.5;                  // tolerance multiplier on the direct car time
  double latest_anchor_prob = 0.5;     // share of latest-arrival anchored requests
  double min_slack_min = 2.0;          // M >= direct car time + this margin
};

// Zones partition by radius; shares are normalized internally. Positions are
// drawn uniformly by area within the zone annulus.
std::vector<TravelRequest> generate_requests(int n, const std::vector<ZoneSpec>& zones,
                                             const DemandParams& params, const PTConfig& cfg,
                                             std::uint64_t seed);

struct PartitionParams {
  double max_walk_km = 2.52;  // circuity-adjusted walking budget per access leg
  double tau_rs_min = 15.0;   // assumed feeder ride time for mixed-mode tests
  int k_closest = 5;
};

struct StopRef {
  int stop = -1;
  double value = 0.0;  // walking km or feeder minutes depending on producer
};

// Up to k active stops by circuity-adjusted walking distance, stops beyond
// max_walk_km excluded. Ties by stop id.
std::vector<StopRef> closest_stops(const Point& p, const PTGraph& g, int k, double max_walk_km,
                                   const PTConfig& cfg);

// Up to k active stops by feeder (car) travel time, no distance cap.
std::vector<StopRef> feeder_stops(const Point& p, const PTGraph& g, int k, const PTConfig& cfg);

enum class ModeClass { Walk, Pt, Rs, WalkPtRs, RsPtWalk };

const char* mode_name(ModeClass m);

// Stops chosen when a request was classified (unused ends stay -1).
struct ModeAssignment {
  ModeClass mode = ModeClass::Rs;
  int ingress_stop = -1;
  int egress_stop = -1;
};

struct PartitionedDemand {
  std::vector<int> walk;
  std::vector<int> pt;
  std::vector<int> rs;
  std::vector<int> walk_pt_rs;
  std::vector<int> rs_pt_walk;
  std::unordered_map<int, ModeAssignment> assignment;  // by request id

  // requests needing a feeder vehicle, ascending ids
  std::vector<int> feeder_involved() const;
  ModeClass mode_of(int id) const { return assignment.at(id).mode; }
  std::size_t total() const {
    return walk.size() + pt.size() + rs.size() + walk_pt_rs.size() + rs_pt_walk.size();
  }
};

// Assigns every request to exactly one mode class: pure walk, pure fixed
// route, pure feeder, or one of the two mixed chains. Tests run in this
// order; the first satisfied class wins.
PartitionedDemand partition_demand(const std::vector<TravelRequest>& requests, const PTGraph& g,
                                   const PairTimeMatrix& times, const PartitionParams& params,
                                   const PTConfig& cfg);

}  // namespace ptmod
