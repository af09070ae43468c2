#pragma once

#include "ptmod/geometry.hpp"

namespace ptmod {

// Speeds, circuity factors and service constants shared by every network
// computation. Distances are km, durations minutes unless a name says
// otherwise.
struct PTConfig {
  double pt_speed_kmh = 60.0;
  double car_speed_kmh = 30.0;
  double walk_speed_ms = 1.4;
  double car_circuity = 1.255;
  double walk_circuity = 1.391;
  double ingress_min = 0.0;
  double egress_min = 0.0;
  double change_min = 0.0;
  double dwell_min = 3.0;
  double min_headway_min = 2.0;
  double freq_floor_per_min = 0.06;  // lowest tolerated line frequency
  double freq_cap_per_min = 0.25;    // highest tolerated line frequency
};

inline double walk_km(const Point& a, const Point& b, const PTConfig& cfg) {
  return euclidean_km(a, b) * cfg.walk_circuity;
}

inline double walk_time_min(const Point& a, const Point& b, const PTConfig& cfg) {
  // m/s -> km/min
  return walk_km(a, b, cfg) / (cfg.walk_speed_ms * 0.06);
}

inline double car_km(const Point& a, const Point& b, const PTConfig& cfg) {
  return euclidean_km(a, b) * cfg.car_circuity;
}

inline double car_time_min(const Point& a, const Point& b, const PTConfig& cfg) {
  return car_km(a, b, cfg) / cfg.car_speed_kmh * 60.0;
}

inline double segment_time_min(const Point& a, const Point& b, const PTConfig& cfg) {
  return euclidean_km(a, b) / cfg.pt_speed_kmh * 60.0;
}

}  // namespace ptmod
