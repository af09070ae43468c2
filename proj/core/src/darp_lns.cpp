#include "ptmod/darp_lns.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace ptmod {

namespace {

constexpr double kEps = 1e-9;

// +1 for pickups, -1 for dropoffs
std::unordered_map<int, int> load_deltas(const RSInstance& inst) {
  std::unordered_map<int, int> delta;
  for (const auto& rr : inst.requests) {
    for (int id : rr.pickups) delta.emplace(id, 1);
    for (int id : rr.dropoffs) delta.emplace(id, -1);
  }
  return delta;
}

}  // namespace

double route_km(const Route& r, const RSInstance& inst) {
  double km = 0.0;
  int prev = 0;
  for (const auto& v : r.visits) {
    km += inst.leg_km(prev, v.node);
    prev = v.node;
  }
  if (!r.visits.empty()) km += inst.leg_km(prev, 0);
  return km;
}

RouteCheck route_feasible(const Route& r, const RSInstance& inst) {
  const auto delta = load_deltas(inst);
  double t = 0.0;
  int prev = 0;
  int load = 0;
  std::unordered_map<int, std::pair<int, int>> seen;  // owner -> (pickups, dropoffs)
  for (const auto& v : r.visits) {
    auto it = inst.index_of.find(v.node);
    if (it == inst.index_of.end()) return {false, "unknown node " + std::to_string(v.node)};
    const RSNode& nd = inst.node(v.node);
    if (nd.kind == NodeKind::Depot) return {false, "depot in the middle of a route"};
    const double arr = t + inst.leg_min(prev, v.node);
    if (arr > nd.latest + kEps)
      return {false, "node " + std::to_string(v.node) + " reached after its window"};
    t = std::max(arr, nd.earliest) + nd.service_min;
    auto dit = delta.find(v.node);
    if (dit == delta.end()) return {false, "node " + std::to_string(v.node) + " owned by no request"};
    load += dit->second;
    if (load < 0)
      return {false, "dropoff before pickup at node " + std::to_string(v.node)};
    if (load > inst.capacity)
      return {false, "capacity exceeded at node " + std::to_string(v.node)};
    auto& cnt = seen[nd.owner];
    if (dit->second > 0) {
      ++cnt.first;
    } else {
      if (cnt.first == 0)
        return {false, "request " + std::to_string(nd.owner) + " dropped off before pickup"};
      ++cnt.second;
    }
    prev = v.node;
  }
  if (load != 0) return {false, "route ends with passengers on board"};
  if (t > inst.node(0).latest + kEps) return {false, "route returns after the depot closes"};
  for (const auto& [owner, cnt] : seen) {
    if (cnt.first != 1 || cnt.second != 1)
      return {false, "request " + std::to_string(owner) + " is not served exactly once"};
  }
  return {true, ""};
}

double vehicle_weight(const RSInstance& inst) {
  double km_sum = 0.0;
  for (const auto& rr : inst.requests) {
    double direct = 0.0;
    for (int p : rr.pickups)
      for (int d : rr.dropoffs) direct = std::max(direct, inst.leg_km(p, d));
    km_sum += direct;
  }
  return std::max(1.0, 10.0 * km_sum);
}

double solution_cost(const RSSolution& s, double w_veh) {
  return w_veh * s.fleet_size() + s.total_km +
         1000.0 * w_veh * static_cast<double>(s.unassigned.size());
}

namespace {

// Working state shared by construction, destruction and repair. Node ids are
// small ints, so window/location/ownership lookups go through flat arrays
// instead of the instance's hash maps.
struct Solver {
  const RSInstance& inst;
  double w_veh;

  // indexed by node id
  std::vector<Point> pos;
  std::vector<double> win_e, win_l, svc;
  std::vector<int> owner, ld;
  std::vector<char> depot;

  RSSolution sol;
  std::vector<double> km_cache;                // per route
  std::vector<std::vector<double>> leg_cache;  // per route; legs[g] = km into gap g's right node

  // insertion scratch, sized on demand
  mutable std::vector<double> dist_p, dist_d, pick_delta, drop_delta, adj_delta, drop_suffix;

  explicit Solver(const RSInstance& instance, double w) : inst(instance), w_veh(w) {
    int max_id = 0;
    for (const auto& nd : inst.nodes) max_id = std::max(max_id, nd.id);
    const auto n = static_cast<std::size_t>(max_id) + 1;
    pos.resize(n);
    win_e.assign(n, 0.0);
    win_l.assign(n, 0.0);
    svc.assign(n, 0.0);
    owner.assign(n, -1);
    ld.assign(n, 0);
    depot.assign(n, 0);
    for (const auto& nd : inst.nodes) {
      const auto i = static_cast<std::size_t>(nd.id);
      pos[i] = nd.location;
      win_e[i] = nd.earliest;
      win_l[i] = nd.latest;
      svc[i] = nd.service_min;
      owner[i] = nd.owner;
      depot[i] = nd.kind == NodeKind::Depot ? 1 : 0;
    }
    for (const auto& rr : inst.requests) {
      for (int id : rr.pickups) ld[static_cast<std::size_t>(id)] = 1;
      for (int id : rr.dropoffs) ld[static_cast<std::size_t>(id)] = -1;
    }
  }

  // same arithmetic as RSInstance::leg_km / leg_min
  double km(int a, int b) const {
    if (depot[static_cast<std::size_t>(a)] || depot[static_cast<std::size_t>(b)]) return 0.0;
    return euclidean_km(pos[static_cast<std::size_t>(a)], pos[static_cast<std::size_t>(b)]) *
           inst.car_circuity;
  }
  double mins(int a, int b) const { return km(a, b) / inst.car_speed_kmh * 60.0; }

  void adopt(const RSSolution& s) {
    sol = s;
    km_cache.clear();
    leg_cache.clear();
    km_cache.resize(sol.routes.size());
    leg_cache.resize(sol.routes.size());
    for (std::size_t ri = 0; ri < sol.routes.size(); ++ri) refresh_route(ri);
  }

  // stored times and leg lengths must be current for insertion pruning
  void refresh_route(std::size_t ri) {
    Route& r = sol.routes[ri];
    reschedule(r);
    auto& legs = leg_cache[ri];
    legs.clear();
    legs.reserve(r.visits.size() + 1);
    int prev = 0;
    double sum = 0.0;
    for (const auto& v : r.visits) {
      legs.push_back(km(prev, v.node));
      sum += legs.back();
      prev = v.node;
    }
    legs.push_back(km(prev, 0));
    sum += legs.back();
    km_cache[ri] = r.visits.empty() ? 0.0 : sum;
  }

  double total_km() const {
    double s = 0.0;
    for (double v : km_cache) s += v;
    return s;
  }

  void finalize() {
    sol.total_km = total_km();
    std::sort(sol.unassigned.begin(), sol.unassigned.end());
  }

  // reschedule in place; the caller guarantees order feasibility
  void reschedule(Route& r) const {
    double t = 0.0;
    int prev = 0;
    int load = 0;
    for (auto& v : r.visits) {
      const auto id = static_cast<std::size_t>(v.node);
      v.arrival = t + mins(prev, v.node);
      v.departure = std::max(v.arrival, win_e[id]) + svc[id];
      load += ld[id];
      v.load_after = load;
      t = v.departure;
      prev = v.node;
    }
  }

  struct Candidate {
    bool feasible = false;
    int route = -1;  // -1 opens a new vehicle
    int gap_p = 0;   // pickup goes before original visit gap_p
    int gap_d = 0;   // dropoff goes before original visit gap_d (>= gap_p)
    int pick = 0;
    int drop = 0;
    double delta_km = 0.0;
    double cost = kInf;  // delta_km plus the opening price when route < 0
  };

  // simulate inserting (pick, drop) into route `r` at original-index gaps
  // (gap_p <= gap_d <= size); returns feasibility and the km delta
  bool simulate(const Route& r, int pick, int drop, int gap_p, int gap_d, double& delta_km) const {
    const int m = static_cast<int>(r.visits.size());
    const auto pid = static_cast<std::size_t>(pick);
    const auto did = static_cast<std::size_t>(drop);

    double t = 0.0;
    int prev = 0;
    int load = 0;
    bool past_drop = false;
    for (int i = 0; i <= m; ++i) {
      if (gap_p == i) {
        const double arr = t + mins(prev, pick);
        if (arr > win_l[pid] + kEps) return false;
        t = std::max(arr, win_e[pid]) + svc[pid];
        prev = pick;
        if (++load > inst.capacity) return false;
      }
      if (gap_d == i) {
        const double arr = t + mins(prev, drop);
        if (arr > win_l[did] + kEps) return false;
        t = std::max(arr, win_e[did]) + svc[did];
        prev = drop;
        --load;
        past_drop = true;
      }
      if (i == m) break;
      const auto& v = r.visits[static_cast<std::size_t>(i)];
      const auto id = static_cast<std::size_t>(v.node);
      const double arr = t + mins(prev, v.node);
      if (past_drop && arr <= v.arrival + 1e-12) {
        // the remainder of the schedule is unchanged
        t = v.departure;
        prev = v.node;
        break;
      }
      if (arr > win_l[id] + kEps) return false;
      t = std::max(arr, win_e[id]) + svc[id];
      prev = v.node;
      load += ld[id];
      if (load > inst.capacity) return false;
    }
    if (t > win_l[0] + kEps) return false;

    const auto at = [&](int idx) { return idx < 0 || idx >= m ? 0 : r.visits[static_cast<std::size_t>(idx)].node; };
    if (gap_p == gap_d) {
      const int a = at(gap_p - 1);
      const int b = at(gap_p);
      delta_km = km(a, pick) + km(pick, drop) + km(drop, b) - km(a, b);
    } else {
      const int a1 = at(gap_p - 1);
      const int b1 = at(gap_p);
      const int a2 = at(gap_d - 1);
      const int b2 = at(gap_d);
      delta_km = km(a1, pick) + km(pick, b1) - km(a1, b1) +
                 km(a2, drop) + km(drop, b2) - km(a2, b2);
    }
    return true;
  }

  // cheapest feasible insertion of the request over routes, gaps and
  // alternatives; also prices a fresh vehicle. Routes are screened with a km
  // lower bound so only the promising ones pay for schedule simulation.
  Candidate best_insertion(int request_id) const {
    const RSRequest& rr = inst.request_of(request_id);
    Candidate best;
    for (int ri = 0; ri < static_cast<int>(sol.routes.size()); ++ri) {
      const Route& r = sol.routes[static_cast<std::size_t>(ri)];
      const int m = static_cast<int>(r.visits.size());
      const auto& legs = leg_cache[static_cast<std::size_t>(ri)];
      const auto gaps = static_cast<std::size_t>(m) + 1;
      if (dist_p.size() < gaps + 1) {
        dist_p.resize(gaps + 1);
        dist_d.resize(gaps + 1);
        pick_delta.resize(gaps);
        drop_delta.resize(gaps);
        adj_delta.resize(gaps);
        drop_suffix.resize(gaps + 1);
      }
      for (int pick : rr.pickups) {
        const auto pid = static_cast<std::size_t>(pick);
        for (int drop : rr.dropoffs) {
          // static km deltas per gap: dist_*[j] is the distance from the node
          // right of gap j (depot past the end) to the inserted node
          const double kpd = km(pick, drop);
          for (int j = 0; j <= m; ++j) {
            const int node = j < m ? r.visits[static_cast<std::size_t>(j)].node : 0;
            dist_p[static_cast<std::size_t>(j)] = km(node, pick);
            dist_d[static_cast<std::size_t>(j)] = km(node, drop);
          }
          const auto left = [&](const std::vector<double>& d, int g) {
            return g == 0 ? 0.0 : d[static_cast<std::size_t>(g - 1)];
          };
          for (int g = 0; g <= m; ++g) {
            const auto gi = static_cast<std::size_t>(g);
            pick_delta[gi] = left(dist_p, g) + dist_p[gi] - legs[gi];
            drop_delta[gi] = left(dist_d, g) + dist_d[gi] - legs[gi];
            adj_delta[gi] = left(dist_p, g) + kpd + dist_d[gi] - legs[gi];
          }
          drop_suffix[gaps] = kInf;
          for (int g = m; g >= 0; --g)
            drop_suffix[static_cast<std::size_t>(g)] =
                std::min(drop_delta[static_cast<std::size_t>(g)],
                         drop_suffix[static_cast<std::size_t>(g) + 1]);
          double bound = kInf;
          for (int g = 0; g <= m; ++g) {
            const auto gi = static_cast<std::size_t>(g);
            bound = std::min(bound, adj_delta[gi]);
            bound = std::min(bound, pick_delta[gi] + drop_suffix[gi + 1]);
          }
          if (bound >= best.cost - 1e-12) continue;

          for (int gp = 0; gp <= m; ++gp) {
            // prune: departure before the gap already beyond the pickup window
            if (gp > 0 &&
                r.visits[static_cast<std::size_t>(gp - 1)].departure +
                        mins(r.visits[static_cast<std::size_t>(gp - 1)].node, pick) >
                    win_l[pid] + kEps)
              break;
            const double pd = pick_delta[static_cast<std::size_t>(gp)];
            if (std::min(adj_delta[static_cast<std::size_t>(gp)],
                         pd + drop_suffix[static_cast<std::size_t>(gp) + 1]) >=
                best.cost - 1e-12)
              continue;
            for (int gd = gp; gd <= m; ++gd) {
              const double stat = gd == gp ? adj_delta[static_cast<std::size_t>(gd)]
                                           : pd + drop_delta[static_cast<std::size_t>(gd)];
              if (stat >= best.cost - 1e-12) continue;
              double dkm = 0.0;
              if (!simulate(r, pick, drop, gp, gd, dkm)) continue;
              if (dkm < best.cost - 1e-12) {
                best = {true, ri, gp, gd, pick, drop, dkm, dkm};
              }
            }
          }
        }
      }
    }
    // fresh vehicle
    const Route empty;
    for (int pick : rr.pickups) {
      for (int drop : rr.dropoffs) {
        double dkm = 0.0;
        if (!simulate(empty, pick, drop, 0, 0, dkm)) continue;
        const double cost = w_veh + dkm;
        if (cost < best.cost - 1e-12) best = {true, -1, 0, 0, pick, drop, dkm, cost};
      }
    }
    return best;
  }

  void commit(int request_id, const Candidate& c) {
    if (!c.feasible) throw std::logic_error("committing an infeasible insertion");
    if (c.route < 0) {
      Route r;
      r.visits.push_back({c.pick, 0.0, 0.0, 0});
      r.visits.push_back({c.drop, 0.0, 0.0, 0});
      sol.routes.push_back(std::move(r));
      km_cache.push_back(0.0);
      leg_cache.emplace_back();
      refresh_route(sol.routes.size() - 1);
    } else {
      Route& r = sol.routes[static_cast<std::size_t>(c.route)];
      r.visits.insert(r.visits.begin() + c.gap_d, Visit{c.drop, 0.0, 0.0, 0});
      r.visits.insert(r.visits.begin() + c.gap_p, Visit{c.pick, 0.0, 0.0, 0});
      refresh_route(static_cast<std::size_t>(c.route));
    }
    sol.chosen[request_id] = {c.pick, c.drop};
  }

  // removes the request's two visits
  void remove_request(int request_id) {
    auto it = sol.chosen.find(request_id);
    if (it == sol.chosen.end()) return;
    for (std::size_t ri = 0; ri < sol.routes.size(); ++ri) {
      Route& r = sol.routes[ri];
      const auto before = r.visits.size();
      r.visits.erase(std::remove_if(r.visits.begin(), r.visits.end(),
                                    [&](const Visit& v) {
                                      return owner[static_cast<std::size_t>(v.node)] == request_id;
                                    }),
                     r.visits.end());
      if (r.visits.size() != before) {
        refresh_route(ri);
        break;
      }
    }
    sol.chosen.erase(it);
    purge_empty();
  }

  void purge_empty() {
    for (std::size_t i = 0; i < sol.routes.size();) {
      if (sol.routes[i].visits.empty()) {
        sol.routes.erase(sol.routes.begin() + static_cast<std::ptrdiff_t>(i));
        km_cache.erase(km_cache.begin() + static_cast<std::ptrdiff_t>(i));
        leg_cache.erase(leg_cache.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }
  }

  std::vector<int> assigned_ids() const {
    std::vector<int> ids;
    ids.reserve(sol.chosen.size());
    for (const auto& [rid, _] : sol.chosen) ids.push_back(rid);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  // km saved by dropping each assigned request, from the cached leg lengths
  std::vector<std::pair<double, int>> removal_gains() const {
    std::vector<std::pair<double, int>> out;
    out.reserve(sol.chosen.size());
    for (std::size_t ri = 0; ri < sol.routes.size(); ++ri) {
      const Route& r = sol.routes[ri];
      const auto& legs = leg_cache[ri];
      const int m = static_cast<int>(r.visits.size());
      const auto at = [&](int idx) {
        return idx < 0 || idx >= m ? 0 : r.visits[static_cast<std::size_t>(idx)].node;
      };
      for (int pi = 0; pi < m; ++pi) {
        const int node = r.visits[static_cast<std::size_t>(pi)].node;
        if (ld[static_cast<std::size_t>(node)] != 1) continue;  // pickups anchor the pair
        const int rid = owner[static_cast<std::size_t>(node)];
        int di = -1;
        for (int j = pi + 1; j < m; ++j)
          if (owner[static_cast<std::size_t>(r.visits[static_cast<std::size_t>(j)].node)] == rid) {
            di = j;
            break;
          }
        if (di < 0) continue;
        double gain;
        if (di == pi + 1) {
          gain = legs[static_cast<std::size_t>(pi)] + legs[static_cast<std::size_t>(pi + 1)] +
                 legs[static_cast<std::size_t>(pi + 2)] - km(at(pi - 1), at(pi + 2));
        } else {
          gain = legs[static_cast<std::size_t>(pi)] + legs[static_cast<std::size_t>(pi + 1)] -
                 km(at(pi - 1), at(pi + 1)) + legs[static_cast<std::size_t>(di)] +
                 legs[static_cast<std::size_t>(di + 1)] - km(at(di - 1), at(di + 1));
        }
        out.emplace_back(gain, rid);
      }
    }
    return out;
  }
};

}  // namespace

PartialSolution destroy(const RSSolution& s, int q, RemovalOp op, const RSInstance& inst,
                        Rng& rng) {
  Solver sv(inst, 0.0);
  sv.adopt(s);
  PartialSolution out;

  auto assigned = sv.assigned_ids();
  q = std::min<int>(q, static_cast<int>(assigned.size()));
  if (q <= 0) {
    sv.finalize();
    out.solution = sv.sol;
    return out;
  }

  switch (op) {
    case RemovalOp::Random: {
      rng.shuffle(assigned);
      out.pool.assign(assigned.begin(), assigned.begin() + q);
      break;
    }
    case RemovalOp::Worst: {
      for (int round = 0; round < q; ++round) {
        auto gains = sv.removal_gains();
        if (gains.empty()) break;
        std::sort(gains.begin(), gains.end(), [](const auto& a, const auto& b) {
          return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        const int best_id = gains.front().second;
        out.pool.push_back(best_id);
        sv.remove_request(best_id);
      }
      break;
    }
    case RemovalOp::Related: {
      // window start plus pickup location proximity
      double min_e = kInf, max_l = -kInf;
      Point lo{kInf, kInf}, hi{-kInf, -kInf};
      for (const auto& nd : inst.nodes) {
        if (nd.kind == NodeKind::Depot) continue;
        min_e = std::min(min_e, nd.earliest);
        max_l = std::max(max_l, nd.latest);
        lo.x = std::min(lo.x, nd.location.x);
        lo.y = std::min(lo.y, nd.location.y);
        hi.x = std::max(hi.x, nd.location.x);
        hi.y = std::max(hi.y, nd.location.y);
      }
      const double span_t = std::max(max_l - min_e, 1.0);
      const double span_d = std::max(euclidean_km(lo, hi), 1e-6);

      const int seed_id = assigned[static_cast<std::size_t>(rng.uniform_int(
          0, static_cast<int>(assigned.size()) - 1))];
      const auto key = [&](int rid) {
        const auto& [pick, drop] = sv.sol.chosen.at(rid);
        (void)drop;
        const RSNode& nd = inst.node(pick);
        return std::make_pair(nd.location, nd.earliest);
      };
      const auto [seed_loc, seed_e] = key(seed_id);
      std::vector<std::pair<double, int>> scored;
      for (int rid : assigned) {
        if (rid == seed_id) continue;
        const auto [loc, e] = key(rid);
        const double score =
            euclidean_km(seed_loc, loc) / span_d + std::abs(e - seed_e) / span_t;
        scored.emplace_back(score, rid);
      }
      std::sort(scored.begin(), scored.end());
      out.pool.push_back(seed_id);
      for (int i = 0; i + 1 < q && i < static_cast<int>(scored.size()); ++i)
        out.pool.push_back(scored[static_cast<std::size_t>(i)].second);
      break;
    }
  }

  if (op != RemovalOp::Worst)
    for (int rid : out.pool) sv.remove_request(rid);
  std::sort(out.pool.begin(), out.pool.end());
  sv.finalize();
  out.solution = sv.sol;
  return out;
}

RSSolution repair(const PartialSolution& partial, const RSInstance& inst, double w_veh) {
  Solver sv(inst, w_veh);
  sv.adopt(partial.solution);

  // pool of (estimated cost, request); estimates go stale when an insertion
  // touches a route, so the cheapest entry is re-priced before committing
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  std::vector<int> pool = partial.pool;
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  // also retry anything the incoming solution left unassigned
  for (int rid : sv.sol.unassigned)
    if (!std::binary_search(pool.begin(), pool.end(), rid)) pool.push_back(rid);
  std::sort(pool.begin(), pool.end());
  sv.sol.unassigned.clear();

  for (int rid : pool) heap.push({sv.best_insertion(rid).cost, rid});

  std::vector<char> placed(pool.size(), 0);
  const auto pool_index = [&](int rid) {
    return static_cast<std::size_t>(
        std::lower_bound(pool.begin(), pool.end(), rid) - pool.begin());
  };

  while (!heap.empty()) {
    const auto [est, rid] = heap.top();
    heap.pop();
    if (placed[pool_index(rid)]) continue;
    const auto cand = sv.best_insertion(rid);
    if (!cand.feasible) {
      placed[pool_index(rid)] = 1;
      sv.sol.unassigned.push_back(rid);
      continue;
    }
    if (!heap.empty() && cand.cost > heap.top().first + 1e-12) {
      heap.push({cand.cost, rid});
      continue;
    }
    sv.commit(rid, cand);
    placed[pool_index(rid)] = 1;
  }

  sv.finalize();
  return sv.sol;
}

RSSolution greedy_initial(const RSInstance& inst, std::uint64_t seed) {
  (void)seed;  // construction is deterministic
  const double w = vehicle_weight(inst);
  Solver sv(inst, w);
  sv.adopt(RSSolution{});

  // tightest service window first
  std::vector<std::pair<double, int>> order;
  for (const auto& rr : inst.requests) {
    double slack = kInf;
    for (int p : rr.pickups)
      for (int d : rr.dropoffs)
        slack = std::min(slack, inst.node(d).latest - inst.node(p).earliest);
    order.emplace_back(slack, rr.request_id);
  }
  std::sort(order.begin(), order.end());

  for (const auto& [slack, rid] : order) {
    const auto cand = sv.best_insertion(rid);
    if (cand.feasible)
      sv.commit(rid, cand);
    else
      sv.sol.unassigned.push_back(rid);
  }
  sv.finalize();
  return sv.sol;
}

std::vector<std::string> solution_violations(const RSSolution& s, const RSInstance& inst) {
  std::vector<std::string> out;

  std::unordered_map<int, int> times_seen;  // request -> routes touching it
  double km = 0.0;
  for (std::size_t ri = 0; ri < s.routes.size(); ++ri) {
    const auto& r = s.routes[ri];
    if (r.visits.empty()) {
      out.push_back("route " + std::to_string(ri) + " is empty");
      continue;
    }
    const auto check = route_feasible(r, inst);
    if (!check.feasible)
      out.push_back("route " + std::to_string(ri) + ": " + check.violation);
    km += route_km(r, inst);
    std::unordered_map<int, bool> seen_here;
    for (const auto& v : r.visits) {
      const int owner = inst.node(v.node).owner;
      if (!seen_here.count(owner)) {
        seen_here.emplace(owner, true);
        ++times_seen[owner];
      }
    }
  }
  if (std::abs(km - s.total_km) > 1e-6)
    out.push_back("total km bookkeeping is off by " +
                  std::to_string(std::abs(km - s.total_km)));

  for (const auto& rr : inst.requests) {
    const bool assigned = s.chosen.count(rr.request_id) > 0;
    const bool listed_unassigned =
        std::find(s.unassigned.begin(), s.unassigned.end(), rr.request_id) != s.unassigned.end();
    const int touched = times_seen.count(rr.request_id) ? times_seen.at(rr.request_id) : 0;
    if (assigned == listed_unassigned)
      out.push_back("request " + std::to_string(rr.request_id) +
                    " must be either assigned or unassigned");
    if (assigned && touched != 1)
      out.push_back("request " + std::to_string(rr.request_id) + " touches " +
                    std::to_string(touched) + " routes");
    if (!assigned && touched != 0)
      out.push_back("request " + std::to_string(rr.request_id) +
                    " appears in a route while unassigned");
    if (assigned) {
      const auto& [pick, drop] = s.chosen.at(rr.request_id);
      const bool pick_ok =
          std::find(rr.pickups.begin(), rr.pickups.end(), pick) != rr.pickups.end();
      const bool drop_ok =
          std::find(rr.dropoffs.begin(), rr.dropoffs.end(), drop) != rr.dropoffs.end();
      if (!pick_ok || !drop_ok)
        out.push_back("request " + std::to_string(rr.request_id) +
                      " uses nodes outside its alternatives");
    }
  }
  return out;
}

RSSolution lns_solve(const RSInstance& inst, const LnsParams& params) {
  const double w = vehicle_weight(inst);
  RSSolution cur = greedy_initial(inst, params.seed);
  RSSolution best = cur;
  if (inst.requests.empty() || params.iterations <= 0) return best;

  Rng rng(mix64(params.seed, 0x6c6e73ULL));
  const double c0 = std::max(solution_cost(cur, w), 1.0);
  double temp = params.accept_worse_frac * c0 / std::numbers::ln2;
  const double cooling =
      std::pow(params.end_temp_ratio, 1.0 / static_cast<double>(std::max(params.iterations, 1)));

  double cur_cost = solution_cost(cur, w);
  double best_cost = cur_cost;

  for (int it = 0; it < params.iterations; ++it) {
    const int assigned = static_cast<int>(cur.chosen.size());
    if (assigned == 0) break;
    const int cap = params.removal_cap > 0 ? params.removal_cap : assigned;
    const int q_max = std::max(
        1, std::min({static_cast<int>(params.removal_max_share * assigned), cap, assigned}));
    const int q_min =
        std::max(1, std::min(static_cast<int>(params.removal_min_share * assigned), q_max));
    const int q = rng.uniform_int(q_min, q_max);
    const auto op = static_cast<RemovalOp>(rng.uniform_int(0, 2));

    auto partial = destroy(cur, q, op, inst, rng);
    RSSolution cand = repair(partial, inst, w);
    const double cand_cost = solution_cost(cand, w);

    bool accept = cand_cost <= cur_cost + 1e-12;
    if (!accept) {
      const double p = std::exp(-(cand_cost - cur_cost) / std::max(temp, 1e-12));
      accept = rng.uniform01() < p;
    }
    if (accept) {
      cur = std::move(cand);
      cur_cost = cand_cost;
      if (cur_cost < best_cost - 1e-9) {
        best = cur;
        best_cost = cur_cost;
      }
    }
    temp *= cooling;
  }
  return best;
}

}  // namespace ptmod
