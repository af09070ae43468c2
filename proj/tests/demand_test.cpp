#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ptmod/demand.hpp"

using namespace ptmod;

namespace {

std::vector<ZoneSpec> three_zones() {
  return {{"central", 0.0, 3.0, 0.3, 0.5},
          {"inner", 3.0, 7.0, 0.4, 0.3},
          {"outer", 7.0, 13.0, 0.3, 0.2}};
}

// straight east-west line, 4 km spacing, centered at the origin
PTGraph straight_line_graph(const PTConfig& cfg, int n_stops = 7, double spacing = 4.0) {
  PotentialNetwork net;
  const double half = spacing * (n_stops - 1) / 2.0;
  for (int s = 0; s < n_stops; ++s) net.stop_points.push_back({s * spacing - half, 0.0});
  std::vector<int> ids(static_cast<std::size_t>(n_stops));
  for (int s = 0; s < n_stops; ++s) ids[static_cast<std::size_t>(s)] = s;
  net.lines = {{0, ids}};
  Layout ly;
  ly.active = {std::vector<std::uint8_t>(static_cast<std::size_t>(n_stops), 1)};
  ly.vehicles = {8};
  return activate(net, ly, cfg);
}

}  // namespace

TEST_CASE("request generation is seeded and respects the zone geometry") {
  PTConfig cfg;
  DemandParams dp;
  const auto zones = three_zones();

  const auto a = generate_requests(50, zones, dp, cfg, 99);
  const auto b = generate_requests(50, zones, dp, cfg, 99);
  REQUIRE(a.size() == 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == static_cast<int>(i) + 1);
    CHECK(a[i].origin == b[i].origin);
    CHECK(a[i].destination == b[i].destination);
    CHECK(a[i].anchor_min == b[i].anchor_min);
  }
  const auto c = generate_requests(50, zones, dp, cfg, 100);
  bool any_differs = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    any_differs = any_differs || !(a[i].origin == c[i].origin);
  CHECK(any_differs);

  // every endpoint lies inside some zone annulus
  for (const auto& r : a) {
    for (const Point* p : {&r.origin, &r.destination}) {
      const double rad = std::hypot(p->x, p->y);
      CHECK(rad <= 13.0 + 1e-9);
    }
  }
  CHECK(generate_requests(0, zones, dp, cfg, 1).empty());
}

TEST_CASE("tolerance scales with gamma but the geometry does not") {
  PTConfig cfg;
  DemandParams lo, hi;
  lo.gamma = 1.0;
  hi.gamma = 3.0;
  const auto zones = three_zones();
  const auto a = generate_requests(40, zones, lo, cfg, 7);
  const auto b = generate_requests(40, zones, hi, cfg, 7);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].origin == b[i].origin);
    CHECK(a[i].destination == b[i].destination);
    const double direct = car_time_min(a[i].origin, a[i].destination, cfg);
    CHECK(a[i].tolerance_min >= direct + lo.min_slack_min - 1e-12);
    CHECK(b[i].tolerance_min == doctest::Approx(std::max(3.0 * direct, direct + 2.0)));
    CHECK(b[i].tolerance_min >= a[i].tolerance_min - 1e-12);
    // the service window is the tolerance regardless of the anchor kind
    CHECK(a[i].latest_arrival() - a[i].earliest_departure() ==
          doctest::Approx(a[i].tolerance_min).epsilon(1e-12));
  }
}

TEST_CASE("gamma 1.5 with a 25.1 minute direct ride tolerates 37.65 minutes") {
  PTConfig cfg;
  // pick a distance that makes the direct car time exactly 25.1 min
  const double km = 25.1 / 60.0 * cfg.car_speed_kmh / cfg.car_circuity;
  TravelRequest r;
  r.origin = {0.0, 0.0};
  r.destination = {km, 0.0};
  const double direct = car_time_min(r.origin, r.destination, cfg);
  CHECK(direct == doctest::Approx(25.1).epsilon(1e-12));
  CHECK(std::max(1.5 * direct, direct + 2.0) == doctest::Approx(37.65).epsilon(1e-12));
}

TEST_CASE("closest stops filter by the walking budget and sort by distance") {
  PTConfig cfg;
  const PTGraph g = straight_line_graph(cfg);

  // stand right on stop 3 (the center)
  auto near = closest_stops({0.0, 0.0}, g, 5, 2.52, cfg);
  REQUIRE(near.size() == 1);  // neighbors are 4 km * 1.391 away, over budget
  CHECK(near[0].stop == 3);
  CHECK(near[0].value == doctest::Approx(0.0));

  // generous budget: k truncates, ties by id
  auto five = closest_stops({0.0, 0.0}, g, 3, 100.0, cfg);
  REQUIRE(five.size() == 3);
  CHECK(five[0].stop == 3);
  CHECK(five[1].stop == 2);  // 4 km either side; smaller id first
  CHECK(five[2].stop == 4);

  // budget boundary: 0.5 / 1.0 / 3.0 km walks against the 2.52 km default
  PotentialNetwork tiny;
  const double w = cfg.walk_circuity;
  tiny.stop_points = {{0.5 / w, 0.0}, {1.0 / w, 0.0}, {3.0 / w, 0.0}};
  tiny.lines = {{0, {0, 1, 2}}};
  Layout ly;
  ly.active = {{1, 1, 1}};
  ly.vehicles = {2};
  const PTGraph tg = activate(tiny, ly, cfg);
  auto within = closest_stops({0.0, 0.0}, tg, 5, 2.52, cfg);
  REQUIRE(within.size() == 2);
  CHECK(within[0].stop == 0);
  CHECK(within[1].stop == 1);

  CHECK(closest_stops({0.0, 0.0}, PTGraph{}, 5, 2.52, cfg).empty());
}

TEST_CASE("feeder stops rank by car time without a cap") {
  PTConfig cfg;
  const PTGraph g = straight_line_graph(cfg);
  auto fs = feeder_stops({9.0, 0.0}, g, 3, cfg);
  REQUIRE(fs.size() == 3);
  CHECK(fs[0].stop == 5);  // at x=8
  CHECK(fs[1].stop == 6);  // at x=12; 3 km < 5 km to stop 4
  CHECK(fs[2].stop == 4);
  CHECK(fs[0].value == doctest::Approx(car_time_min({9.0, 0.0}, {8.0, 0.0}, cfg)));
}

TEST_CASE("partition assigns each hand-built request to its class") {
  PTConfig cfg;
  const PTGraph g = straight_line_graph(cfg);
  LineMultigraph mg = build_multigraph(g, {8.0 / (2.0 * 45.0)}, cfg);
  const PairTimeMatrix times = pair_time_matrix(mg, cfg);
  PartitionParams pp;

  std::vector<TravelRequest> rs;
  // walk: 1.0 km euclidean -> 1.391 km walk, inside the budget
  rs.push_back({1, {0.2, 0.1}, {1.2, 0.1}, TravelRequest::Anchor::EarliestDeparture, 10.0, 60.0});
  // pt: stop to stop along the line, generous tolerance
  rs.push_back({2, {-12.0, 0.3}, {12.0, -0.3}, TravelRequest::Anchor::EarliestDeparture, 0.0, 120.0});
  // rs: both ends far off the line, tight tolerance
  rs.push_back({3, {3.0, 40.0}, {-2.0, 44.0}, TravelRequest::Anchor::EarliestDeparture, 5.0, 30.0});
  // walk ingress, ride, feeder egress: destination far from any stop
  rs.push_back({4, {-12.1, 0.2}, {12.0, 9.0}, TravelRequest::Anchor::EarliestDeparture, 0.0, 65.0});
  // feeder ingress, ride, walk egress: origin far from any stop
  rs.push_back({5, {-12.0, 9.0}, {12.1, -0.2}, TravelRequest::Anchor::LatestArrival, 170.0, 65.0});

  const auto pd = partition_demand(rs, g, times, pp, cfg);
  CHECK(pd.walk == std::vector<int>{1});
  CHECK(pd.pt == std::vector<int>{2});
  CHECK(pd.rs == std::vector<int>{3});
  CHECK(pd.walk_pt_rs == std::vector<int>{4});
  CHECK(pd.rs_pt_walk == std::vector<int>{5});
  CHECK(pd.total() == rs.size());
  CHECK(pd.feeder_involved() == std::vector<int>{3, 4, 5});
  CHECK(pd.mode_of(4) == ModeClass::WalkPtRs);

  // assignments carry the stops that satisfied the test; the mixed chains
  // charge a flat feeder allowance, so they minimize the ride leg
  const auto& a4 = pd.assignment.at(4);
  CHECK(a4.ingress_stop == 0);
  CHECK(a4.egress_stop == 2);  // nearest transfer candidate to the ingress stop
  const auto& a5 = pd.assignment.at(5);
  CHECK(a5.ingress_stop == 4);
  CHECK(a5.egress_stop == 6);
}

TEST_CASE("the mixed-chain tolerance check is a sharp threshold") {
  PTConfig cfg;
  PartitionParams pp;
  const PTGraph g = straight_line_graph(cfg);
  const double f = frequency_per_min(8, line_end_to_end_min(g, 0, cfg));
  const LineMultigraph mg = build_multigraph(g, {f}, cfg);
  const PairTimeMatrix times = pair_time_matrix(mg, cfg);

  // origin a 10 minute walk west of stop 0; destination far east so the five
  // car-closest transfer stops are {2..6} and the cheapest chain rides 0 -> 2
  const double ekm = 10.0 * cfg.walk_speed_ms * 0.06 / cfg.walk_circuity;
  const Point origin{-12.0 - ekm, 0.0};
  const Point dest{30.0, 0.0};
  const double chain =
      walk_time_min(origin, g.point(0), cfg) + times.at(0, 2) + pp.tau_rs_min;
  CHECK(chain == doctest::Approx(10.0 + times.at(0, 2) + 15.0));

  TravelRequest r{1, origin, dest, TravelRequest::Anchor::EarliestDeparture, 0.0, chain + 0.5};
  const auto pd = partition_demand({r}, g, times, pp, cfg);
  CHECK(pd.walk_pt_rs == std::vector<int>{1});
  CHECK(pd.assignment.at(1).egress_stop == 2);

  // shave the tolerance under the best chain and the trip falls back to a
  // pure feeder ride
  r.tolerance_min = chain - 0.5;
  const auto pd2 = partition_demand({r}, g, times, pp, cfg);
  CHECK(pd2.rs == std::vector<int>{1});
}

TEST_CASE("partition is exhaustive, disjoint and repeatable on random demand") {
  PTConfig cfg;
  const PTGraph g = straight_line_graph(cfg);
  const LineMultigraph mg = build_multigraph(g, {0.1}, cfg);
  const PairTimeMatrix times = pair_time_matrix(mg, cfg);
  PartitionParams pp;
  DemandParams dp;

  const auto reqs = generate_requests(300, three_zones(), dp, cfg, 5);
  const auto pd = partition_demand(reqs, g, times, pp, cfg);
  const auto pd2 = partition_demand(reqs, g, times, pp, cfg);

  CHECK(pd.total() == reqs.size());
  std::vector<int> seen(reqs.size() + 1, 0);
  for (const auto* v : {&pd.walk, &pd.pt, &pd.rs, &pd.walk_pt_rs, &pd.rs_pt_walk})
    for (int id : *v) ++seen[static_cast<std::size_t>(id)];
  for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i] == 1);

  CHECK(pd.walk == pd2.walk);
  CHECK(pd.rs == pd2.rs);
  CHECK(pd.walk_pt_rs == pd2.walk_pt_rs);
}

TEST_CASE("activating more stops never steals walkers") {
  PTConfig cfg;
  DemandParams dp;
  const auto reqs = generate_requests(200, three_zones(), dp, cfg, 11);
  PartitionParams pp;

  PotentialNetwork net;
  for (int s = 0; s < 7; ++s) net.stop_points.push_back({s * 4.0 - 12.0, 0.0});
  net.lines = {{0, {0, 1, 2, 3, 4, 5, 6}}};

  Layout sparse;
  sparse.active = {{1, 0, 0, 1, 0, 0, 1}};
  sparse.vehicles = {8};
  Layout dense;
  dense.active = {std::vector<std::uint8_t>(7, 1)};
  dense.vehicles = {8};

  const auto classify = [&](const Layout& ly) {
    const PTGraph g = activate(net, ly, cfg);
    const double f = frequency_per_min(8, line_end_to_end_min(g, 0, cfg));
    const auto times = pair_time_matrix(build_multigraph(g, {f}, cfg), cfg);
    return partition_demand(reqs, g, times, pp, cfg);
  };
  const auto a = classify(sparse);
  const auto b = classify(dense);
  CHECK(a.walk == b.walk);  // the walk test ignores the network entirely
}
