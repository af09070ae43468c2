#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "ptmod/config.hpp"
#include "ptmod/geometry.hpp"

namespace ptmod {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A candidate line: ordered potential stops, all of which may be activated or
// skipped by a layout.
struct PotentialLine {
  int id = 0;
  std::vector<int> stops;  // global stop ids in service order
};

struct PotentialNetwork {
  std::vector<Point> stop_points;  // indexed by global stop id
  std::vector<PotentialLine> lines;
};

// throws std::invalid_argument on out-of-range ids, repeated stops within a
// line, or lines with fewer than two potential stops
void validate_network(const PotentialNetwork& net);

// Upper-level decision vector: one activation bit per potential stop per line
// plus a vehicle count per line.
struct Layout {
  std::vector<std::vector<std::uint8_t>> active;  // [line][position]
  std::vector<int> vehicles;                      // per line
};

bool operator==(const Layout& a, const Layout& b);
std::uint64_t layout_hash(const Layout& layout);

struct PTArc {
  int from = 0;
  int to = 0;
  int line = 0;
};

// The operated network induced by a layout: per line, the active stops in
// order; arcs join consecutive active stops in both directions.
struct PTGraph {
  std::vector<int> stops;                    // active stop ids, ascending
  std::vector<std::vector<int>> line_stops;  // [line] active ids in line order
  std::vector<PTArc> arcs;
  std::unordered_map<int, Point> points;
  std::unordered_map<int, double> dwell_min;  // per active stop

  bool has_stop(int id) const { return points.count(id) > 0; }
  const Point& point(int id) const { return points.at(id); }
  double dwell(int id) const { return dwell_min.at(id); }
};

// layout dimensions must match the network; stop dwell defaults to
// cfg.dwell_min, overridable per stop via `dwell_override` (empty = none)
PTGraph activate(const PotentialNetwork& net, const Layout& layout, const PTConfig& cfg,
                 const std::vector<double>& dwell_override = {});

// End-to-end travel time of line `line` over its active stops: driving time
// over every segment plus a dwell at every active stop.
double line_end_to_end_min(const PTGraph& g, int line, const PTConfig& cfg);

// In-vehicle time from active stop u to active stop v on line `line`,
// including the expected wait 1/(2 f) and the dwell at every traversed active
// stop after u (v included). freq is in vehicles per minute and must be > 0.
double line_time_min(const PTGraph& g, int line, int u, int v, double freq, const PTConfig& cfg);

inline double frequency_per_min(int vehicles, double line_time) {
  return line_time > 0.0 ? static_cast<double>(vehicles) / (2.0 * line_time) : 0.0;
}

struct FleetBounds {
  int n_min = 0;
  int n_max = 0;
};

// Vehicle counts that keep the line frequency within the tolerated band.
// n_max is never allowed below n_min so short lines stay operable.
FleetBounds fleet_bounds(double line_time, const PTConfig& cfg);

// One traversal of a single line between two of its active stops.
struct LineLeg {
  int from = 0;
  int to = 0;
  int line = 0;
  double minutes = 0.0;
};

// Line-labelled multigraph: one weighted arc per ordered active stop pair per
// line, so a shortest path decomposes into maximal single-line legs.
struct LineMultigraph {
  std::vector<int> stops;  // active ids, ascending
  std::unordered_map<int, int> index_of;
  std::vector<std::vector<LineLeg>> out;  // by dense stop index

  bool has_stop(int id) const { return index_of.count(id) > 0; }
};

// freq_per_line must be positive for every line with at least two active stops
LineMultigraph build_multigraph(const PTGraph& g, const std::vector<double>& freq_per_line,
                                const PTConfig& cfg);

struct PathResult {
  bool reachable = false;
  std::vector<LineLeg> legs;
  double total_min = kInf;  // ingress + legs + changes + egress

  int changes() const { return legs.empty() ? 0 : static_cast<int>(legs.size()) - 1; }
};

// Minimum stop-to-stop travel time, ties broken by fewer line changes and then
// by lexicographically smallest line id sequence.
PathResult shortest_pt_path(int from, int to, const LineMultigraph& mg, const PTConfig& cfg);

// All-pairs minimum travel times over the active stops.
struct PairTimeMatrix {
  std::vector<int> stops;
  std::unordered_map<int, int> index_of;
  std::vector<double> minutes;  // row-major, stops x stops, kInf = unreachable

  bool has_stop(int id) const { return index_of.count(id) > 0; }
  double at(int from, int to) const {
    auto f = index_of.find(from);
    auto t = index_of.find(to);
    if (f == index_of.end() || t == index_of.end()) return kInf;
    return minutes[static_cast<std::size_t>(f->second) * stops.size() +
                   static_cast<std::size_t>(t->second)];
  }
};

PairTimeMatrix pair_time_matrix(const LineMultigraph& mg, const PTConfig& cfg);

}  // namespace ptmod
