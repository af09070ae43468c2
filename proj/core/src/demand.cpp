#include "ptmod/demand.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ptmod/rng.hpp"

namespace ptmod {

namespace {

Point sample_in_zone(const ZoneSpec& z, Rng& rng) {
  // uniform by area within the annulus
  const double ri2 = z.r_inner_km * z.r_inner_km;
  const double ro2 = z.r_outer_km * z.r_outer_km;
  const double r = std::sqrt(ri2 + rng.uniform01() * (ro2 - ri2));
  const double theta = rng.uniform01() * 2.0 * std::numbers::pi;
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

std::vector<TravelRequest> generate_requests(int n, const std::vector<ZoneSpec>& zones,
                                             const DemandParams& params, const PTConfig& cfg,
                                             std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("negative request count");
  if (zones.empty()) throw std::invalid_argument("no demand zones");
  for (const auto& z : zones)
    if (z.r_outer_km <= z.r_inner_km)
      throw std::invalid_argument("zone " + z.name + " has an empty radius band");

  std::vector<double> origin_w, dest_w;
  for (const auto& z : zones) {
    origin_w.push_back(z.origin_share);
    dest_w.push_back(z.destination_share);
  }

  Rng rng(mix64(seed, 0x64656d616e64ULL));
  std::vector<TravelRequest> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    TravelRequest r;
    r.id = i + 1;
    r.origin = sample_in_zone(zones[static_cast<std::size_t>(rng.weighted_index(origin_w))], rng);
    r.destination =
        sample_in_zone(zones[static_cast<std::size_t>(rng.weighted_index(dest_w))], rng);
    const double t = rng.uniform(0.0, params.horizon_min);
    const bool latest_anchor = rng.uniform01() < params.latest_anchor_prob;

    const double direct = car_time_min(r.origin, r.destination, cfg);
    r.tolerance_min = std::max(params.gamma * direct, direct + params.min_slack_min);
    r.anchor = latest_anchor ? TravelRequest::Anchor::LatestArrival
                             : TravelRequest::Anchor::EarliestDeparture;
    // a latest-arrival anchor still implies a departure inside the horizon
    r.anchor_min = latest_anchor ? t + r.tolerance_min : t;
    out.push_back(r);
  }
  return out;
}

std::vector<StopRef> closest_stops(const Point& p, const PTGraph& g, int k, double max_walk_km,
                                   const PTConfig& cfg) {
  std::vector<StopRef> all;
  for (int s : g.stops) {
    const double km = walk_km(p, g.point(s), cfg);
    if (km <= max_walk_km) all.push_back({s, km});
  }
  std::sort(all.begin(), all.end(), [](const StopRef& a, const StopRef& b) {
    return a.value != b.value ? a.value < b.value : a.stop < b.stop;
  });
  if (static_cast<int>(all.size()) > k) all.resize(static_cast<std::size_t>(k));
  return all;
}

std::vector<StopRef> feeder_stops(const Point& p, const PTGraph& g, int k, const PTConfig& cfg) {
  std::vector<StopRef> all;
  for (int s : g.stops) all.push_back({s, car_time_min(p, g.point(s), cfg)});
  std::sort(all.begin(), all.end(), [](const StopRef& a, const StopRef& b) {
    return a.value != b.value ? a.value < b.value : a.stop < b.stop;
  });
  if (static_cast<int>(all.size()) > k) all.resize(static_cast<std::size_t>(k));
  return all;
}

const char* mode_name(ModeClass m) {
  switch (m) {
    case ModeClass::Walk: return "walk";
    case ModeClass::Pt: return "pt";
    case ModeClass::Rs: return "rs";
    case ModeClass::WalkPtRs: return "walk_pt_rs";
    case ModeClass::RsPtWalk: return "rs_pt_walk";
  }
  return "?";
}

std::vector<int> PartitionedDemand::feeder_involved() const {
  std::vector<int> ids;
  ids.reserve(rs.size() + walk_pt_rs.size() + rs_pt_walk.size());
  ids.insert(ids.end(), rs.begin(), rs.end());
  ids.insert(ids.end(), walk_pt_rs.begin(), walk_pt_rs.end());
  ids.insert(ids.end(), rs_pt_walk.begin(), rs_pt_walk.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

PartitionedDemand partition_demand(const std::vector<TravelRequest>& requests, const PTGraph& g,
                                   const PairTimeMatrix& times, const PartitionParams& params,
                                   const PTConfig& cfg) {
  PartitionedDemand out;
  for (const auto& r : requests) {
    ModeAssignment a;

    // direct walk
    if (walk_km(r.origin, r.destination, cfg) <= params.max_walk_km) {
      a.mode = ModeClass::Walk;
      out.walk.push_back(r.id);
      out.assignment.emplace(r.id, a);
      continue;
    }

    const auto in_stops = closest_stops(r.origin, g, params.k_closest, params.max_walk_km, cfg);
    const auto out_stops =
        closest_stops(r.destination, g, params.k_closest, params.max_walk_km, cfg);

    // pure fixed route: walk in, ride, walk out, joint walking budget
    double best_pt = kInf;
    int best_in = -1, best_out = -1;
    for (const auto& si : in_stops) {
      for (const auto& so : out_stops) {
        if (si.value + so.value > params.max_walk_km) continue;
        const double ride = times.at(si.stop, so.stop);
        if (ride == kInf) continue;
        const double total = walk_time_min(r.origin, g.point(si.stop), cfg) + ride +
                             walk_time_min(g.point(so.stop), r.destination, cfg);
        if (total < best_pt) {
          best_pt = total;
          best_in = si.stop;
          best_out = so.stop;
        }
      }
    }
    if (best_pt <= r.tolerance_min) {
      a.mode = ModeClass::Pt;
      a.ingress_stop = best_in;
      a.egress_stop = best_out;
      out.pt.push_back(r.id);
      out.assignment.emplace(r.id, a);
      continue;
    }

    // neither end can reach the fixed network on foot: feeder only
    if (in_stops.empty() && out_stops.empty()) {
      a.mode = ModeClass::Rs;
      out.rs.push_back(r.id);
      out.assignment.emplace(r.id, a);
      continue;
    }

    // walk in, ride, feeder out
    if (!in_stops.empty()) {
      const auto transfer = feeder_stops(r.destination, g, params.k_closest, cfg);
      double best = kInf;
      int bi = -1, bt = -1;
      for (const auto& si : in_stops) {
        for (const auto& st : transfer) {
          const double ride = times.at(si.stop, st.stop);
          if (ride == kInf) continue;
          const double total =
              walk_time_min(r.origin, g.point(si.stop), cfg) + ride + params.tau_rs_min;
          if (total < best) {
            best = total;
            bi = si.stop;
            bt = st.stop;
          }
        }
      }
      if (best <= r.tolerance_min) {
        a.mode = ModeClass::WalkPtRs;
        a.ingress_stop = bi;
        a.egress_stop = bt;
        out.walk_pt_rs.push_back(r.id);
        out.assignment.emplace(r.id, a);
        continue;
      }
    }

    // feeder in, ride, walk out
    if (!out_stops.empty()) {
      const auto transfer = feeder_stops(r.origin, g, params.k_closest, cfg);
      double best = kInf;
      int bt = -1, bo = -1;
      for (const auto& st : transfer) {
        for (const auto& so : out_stops) {
          const double ride = times.at(st.stop, so.stop);
          if (ride == kInf) continue;
          const double total =
              params.tau_rs_min + ride + walk_time_min(g.point(so.stop), r.destination, cfg);
          if (total < best) {
            best = total;
            bt = st.stop;
            bo = so.stop;
          }
        }
      }
      if (best <= r.tolerance_min) {
        a.mode = ModeClass::RsPtWalk;
        a.ingress_stop = bt;
        a.egress_stop = bo;
        out.rs_pt_walk.push_back(r.id);
        out.assignment.emplace(r.id, a);
        continue;
      }
    }

    a.mode = ModeClass::Rs;
    out.rs.push_back(r.id);
    out.assignment.emplace(r.id, a);
  }
  return out;
}

}  // namespace ptmod
