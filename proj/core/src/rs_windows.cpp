#include "ptmod/rs_windows.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ptmod {

double RSInstance::leg_km(int a, int b) const {
  const RSNode& na = node(a);
  const RSNode& nb = node(b);
  if (na.kind == NodeKind::Depot || nb.kind == NodeKind::Depot) return 0.0;
  return euclidean_km(na.location, nb.location) * car_circuity;
}

double RSInstance::leg_min(int a, int b) const {
  return leg_km(a, b) / car_speed_kmh * 60.0;
}

const RSRequest& RSInstance::request_of(int request_id) const {
  auto it = std::lower_bound(requests.begin(), requests.end(), request_id,
                             [](const RSRequest& r, int id) { return r.request_id < id; });
  if (it == requests.end() || it->request_id != request_id)
    throw std::invalid_argument("unknown request " + std::to_string(request_id));
  return *it;
}

std::optional<double> latest_departure_at(int stop, const Point& dest, double latest_arrival,
                                          const PTGraph& g, const PairTimeMatrix& times,
                                          double max_walk_km, const PTConfig& cfg) {
  std::optional<double> best;
  for (int v : g.stops) {
    if (walk_km(g.point(v), dest, cfg) > max_walk_km) continue;
    const double ride = times.at(stop, v);
    if (ride == kInf) continue;
    const double t = latest_arrival - ride - walk_time_min(g.point(v), dest, cfg);
    if (!best || t > *best) best = t;
  }
  return best;
}

std::optional<double> earliest_arrival_at(const Point& origin, int stop, double earliest_departure,
                                          const PTGraph& g, const PairTimeMatrix& times,
                                          double max_walk_km, const PTConfig& cfg) {
  std::optional<double> best;
  for (int v : g.stops) {
    if (walk_km(origin, g.point(v), cfg) > max_walk_km) continue;
    const double ride = times.at(v, stop);
    if (ride == kInf) continue;
    const double t = earliest_departure + walk_time_min(origin, g.point(v), cfg) + ride;
    if (!best || t < *best) best = t;
  }
  return best;
}

namespace {

double feeder_min(const Point& a, const Point& b, const PTConfig& cfg) {
  return car_time_min(a, b, cfg);
}

}  // namespace

BuiltInstance build_instance(const PartitionedDemand& classes,
                             const std::vector<TravelRequest>& requests, const PTGraph& g,
                             const PairTimeMatrix& times, const InstanceParams& params,
                             const PTConfig& cfg) {
  BuiltInstance out;
  out.partition = classes;

  RSInstance& inst = out.instance;
  inst.capacity = params.capacity;
  inst.car_speed_kmh = cfg.car_speed_kmh;
  inst.car_circuity = cfg.car_circuity;

  const int n = static_cast<int>(requests.size());
  const int n_stops = static_cast<int>(g.stops.size());
  const double svc = params.service_min;

  // stable node ids: depot 0, origins 1..n, destinations n+1..2n, then one
  // block of |stops| transfer slots per request
  const auto origin_id = [&](int rid) { return rid; };
  const auto dest_id = [&](int rid) { return n + rid; };
  const auto transfer_id = [&](int rid, int stop) {
    const auto it = std::lower_bound(g.stops.begin(), g.stops.end(), stop);
    const int j = static_cast<int>(it - g.stops.begin());
    return 2 * n + (rid - 1) * n_stops + j + 1;
  };

  inst.nodes.push_back({0, NodeKind::Depot, {0.0, 0.0}, 0.0, 0.0, 0.0, -1, -1});

  const auto add_node = [&](RSNode node) {
    inst.nodes.push_back(node);
  };

  std::vector<int> demoted_ids;
  for (int rid : out.partition.feeder_involved()) {
    const TravelRequest& r = requests[static_cast<std::size_t>(rid - 1)];
    const double e_i = r.earliest_departure();
    const double l_i = r.latest_arrival();
    const ModeClass mode = out.partition.mode_of(rid);
    RSRequest rr;
    rr.request_id = rid;

    if (mode == ModeClass::WalkPtRs) {
      // pickup at a transfer stop after the fixed-route leg, dropoff at home
      double dest_earliest = kInf;
      for (const auto& cand : feeder_stops(r.destination, g, params.k_transfer, cfg)) {
        const auto e_s = earliest_arrival_at(r.origin, cand.stop, e_i, g, times,
                                             params.max_walk_km, cfg);
        if (!e_s) continue;
        const double drive = feeder_min(g.point(cand.stop), r.destination, cfg);
        // the pickup service minute must still fit before the deadline,
        // otherwise the alternative can never be scheduled
        if (*e_s + svc + drive > l_i) continue;
        const int id = transfer_id(rid, cand.stop);
        add_node({id, NodeKind::Transfer, g.point(cand.stop), *e_s, l_i - drive, svc, rid,
                  cand.stop});
        rr.pickups.push_back(id);
        dest_earliest = std::min(dest_earliest, *e_s + drive);
      }
      if (!rr.pickups.empty()) {
        add_node({dest_id(rid), NodeKind::Destination, r.destination,
                  std::max(e_i, dest_earliest), l_i, svc, rid, -1});
        rr.dropoffs.push_back(dest_id(rid));
        inst.requests.push_back(std::move(rr));
        continue;
      }
    } else if (mode == ModeClass::RsPtWalk) {
      // pickup at home, dropoff at a transfer stop before the fixed-route leg
      double origin_latest = -kInf;
      for (const auto& cand : feeder_stops(r.origin, g, params.k_transfer, cfg)) {
        const auto l_s = latest_departure_at(cand.stop, r.destination, l_i, g, times,
                                             params.max_walk_km, cfg);
        if (!l_s) continue;
        const double drive = feeder_min(r.origin, g.point(cand.stop), cfg);
        // as above: departing at e_i still spends the pickup service minute
        if (e_i + svc + drive > *l_s) continue;
        const int id = transfer_id(rid, cand.stop);
        add_node({id, NodeKind::Transfer, g.point(cand.stop), e_i + drive, *l_s, svc, rid,
                  cand.stop});
        rr.dropoffs.push_back(id);
        origin_latest = std::max(origin_latest, *l_s - drive);
      }
      if (!rr.dropoffs.empty()) {
        add_node({origin_id(rid), NodeKind::Origin, r.origin, e_i, origin_latest, svc, rid, -1});
        rr.pickups.push_back(origin_id(rid));
        inst.requests.push_back(std::move(rr));
        continue;
      }
    }

    // pure feeder service, door to door; also the fallback when every
    // transfer alternative is unworkable
    if (mode != ModeClass::Rs) demoted_ids.push_back(rid);
    const double drive = feeder_min(r.origin, r.destination, cfg);
    rr.pickups.clear();
    rr.dropoffs.clear();
    add_node({origin_id(rid), NodeKind::Origin, r.origin, e_i, l_i - drive, svc, rid, -1});
    add_node({dest_id(rid), NodeKind::Destination, r.destination, e_i + drive, l_i, svc,
              rid, -1});
    rr.pickups.push_back(origin_id(rid));
    rr.dropoffs.push_back(dest_id(rid));
    inst.requests.push_back(std::move(rr));
  }

  // reflect demotions in the returned partition
  out.demoted = static_cast<int>(demoted_ids.size());
  for (int rid : demoted_ids) {
    auto drop = [&](std::vector<int>& v) { v.erase(std::remove(v.begin(), v.end(), rid), v.end()); };
    drop(out.partition.walk_pt_rs);
    drop(out.partition.rs_pt_walk);
    out.partition.rs.push_back(rid);
    auto& a = out.partition.assignment.at(rid);
    a = ModeAssignment{ModeClass::Rs, -1, -1};
  }
  std::sort(out.partition.rs.begin(), out.partition.rs.end());

  // depot window spans everything a feasible route could need
  double max_latest = params.horizon_min;
  for (const auto& node : inst.nodes) if (node.latest > max_latest) max_latest = node.latest;
  inst.nodes.front().latest = max_latest + 2.0 * svc + 1.0;

  for (std::size_t i = 0; i < inst.nodes.size(); ++i)
    inst.index_of.emplace(inst.nodes[i].id, static_cast<int>(i));
  return out;
}

namespace {

const char* kind_word(NodeKind k) {
  switch (k) {
    case NodeKind::Depot: return "depot";
    case NodeKind::Origin: return "origin";
    case NodeKind::Destination: return "destination";
    case NodeKind::Transfer: return "transfer";
  }
  return "?";
}

NodeKind kind_of(const std::string& w) {
  if (w == "depot") return NodeKind::Depot;
  if (w == "origin") return NodeKind::Origin;
  if (w == "destination") return NodeKind::Destination;
  if (w == "transfer") return NodeKind::Transfer;
  throw std::runtime_error("unknown node kind '" + w + "'");
}

}  // namespace

void dump_instance(const RSInstance& inst, std::ostream& os) {
  os << "rs-instance 1\n";
  os << std::setprecision(17);
  os << "capacity " << inst.capacity << "\n";
  os << "car_speed_kmh " << inst.car_speed_kmh << "\n";
  os << "car_circuity " << inst.car_circuity << "\n";
  os << "nodes " << inst.nodes.size() << "\n";
  for (const auto& nd : inst.nodes) {
    os << nd.id << ' ' << kind_word(nd.kind) << ' ' << nd.location.x << ' ' << nd.location.y
       << ' ' << nd.earliest << ' ' << nd.latest << ' ' << nd.service_min << ' ' << nd.owner
       << ' ' << nd.stop << "\n";
  }
  os << "requests " << inst.requests.size() << "\n";
  for (const auto& rr : inst.requests) {
    os << rr.request_id << " pickups " << rr.pickups.size();
    for (int id : rr.pickups) os << ' ' << id;
    os << " dropoffs " << rr.dropoffs.size();
    for (int id : rr.dropoffs) os << ' ' << id;
    os << "\n";
  }
  os << "end\n";
}

RSInstance load_instance(std::istream& is) {
  RSInstance inst;
  std::string tag;
  int version = 0;
  is >> tag >> version;
  if (tag != "rs-instance" || version != 1)
    throw std::runtime_error("not an rs-instance dump");
  std::size_t n_nodes = 0, n_requests = 0;
  is >> tag >> inst.capacity;
  if (tag != "capacity") throw std::runtime_error("expected capacity");
  is >> tag >> inst.car_speed_kmh;
  if (tag != "car_speed_kmh") throw std::runtime_error("expected car_speed_kmh");
  is >> tag >> inst.car_circuity;
  if (tag != "car_circuity") throw std::runtime_error("expected car_circuity");
  is >> tag >> n_nodes;
  if (tag != "nodes") throw std::runtime_error("expected nodes");
  for (std::size_t i = 0; i < n_nodes; ++i) {
    RSNode nd;
    std::string kind;
    is >> nd.id >> kind >> nd.location.x >> nd.location.y >> nd.earliest >> nd.latest >>
        nd.service_min >> nd.owner >> nd.stop;
    nd.kind = kind_of(kind);
    inst.nodes.push_back(nd);
  }
  is >> tag >> n_requests;
  if (tag != "requests") throw std::runtime_error("expected requests");
  for (std::size_t i = 0; i < n_requests; ++i) {
    RSRequest rr;
    std::size_t np = 0, nd = 0;
    is >> rr.request_id >> tag >> np;
    if (tag != "pickups") throw std::runtime_error("expected pickups");
    rr.pickups.resize(np);
    for (auto& id : rr.pickups) is >> id;
    is >> tag >> nd;
    if (tag != "dropoffs") throw std::runtime_error("expected dropoffs");
    rr.dropoffs.resize(nd);
    for (auto& id : rr.dropoffs) is >> id;
    inst.requests.push_back(std::move(rr));
  }
  is >> tag;
  if (tag != "end" || !is) throw std::runtime_error("truncated rs-instance dump");
  if (inst.nodes.empty() || inst.nodes.front().kind != NodeKind::Depot)
    throw std::runtime_error("first node must be the depot");
  for (std::size_t i = 0; i < inst.nodes.size(); ++i)
    inst.index_of.emplace(inst.nodes[i].id, static_cast<int>(i));
  return inst;
}

}  // namespace ptmod
