#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "ptmod/darp_lns.hpp"
#include "support/oracles.hpp"

using namespace ptmod;

namespace {

RSInstance make_inst(std::vector<RSNode> nodes, std::vector<RSRequest> reqs, int cap = 4) {
  RSInstance inst;
  inst.nodes = std::move(nodes);
  inst.requests = std::move(reqs);
  inst.capacity = cap;
  for (std::size_t i = 0; i < inst.nodes.size(); ++i)
    inst.index_of.emplace(inst.nodes[i].id, static_cast<int>(i));
  return inst;
}

Route mk_route(std::initializer_list<int> ids) {
  Route r;
  for (int id : ids) r.visits.push_back({id, 0.0, 0.0, 0});
  return r;
}

// two door-to-door requests heading east, generous windows
RSInstance two_request_inst(int cap = 4, double depot_latest = 200.0) {
  return make_inst(
      {{0, NodeKind::Depot, {0.0, 0.0}, 0.0, depot_latest, 0.0, -1, -1},
       {1, NodeKind::Origin, {0.0, 0.0}, 0.0, 60.0, 1.0, 1, -1},
       {2, NodeKind::Origin, {1.0, 0.0}, 0.0, 60.0, 1.0, 2, -1},
       {3, NodeKind::Destination, {5.0, 0.0}, 0.0, 120.0, 1.0, 1, -1},
       {4, NodeKind::Destination, {6.0, 0.0}, 0.0, 120.0, 1.0, 2, -1}},
      {{1, {1}, {3}}, {2, {2}, {4}}}, cap);
}

}  // namespace

TEST_CASE("route audit recomputes schedules and flags each violation kind") {
  const RSInstance inst = two_request_inst();

  const auto ok = route_feasible(mk_route({1, 2, 3, 4}), inst);
  CHECK(ok.feasible);
  CHECK(ok.violation.empty());

  // dropoff before its pickup
  const auto order = route_feasible(mk_route({3, 1, 2, 4}), inst);
  CHECK_FALSE(order.feasible);
  CHECK_FALSE(order.violation.empty());

  // pickup without a dropoff on the same vehicle
  CHECK_FALSE(route_feasible(mk_route({1, 2, 4}), inst).feasible);

  // capacity of one cannot hold both passengers at once
  const RSInstance tight = two_request_inst(1);
  CHECK_FALSE(route_feasible(mk_route({1, 2, 3, 4}), tight).feasible);
  CHECK(route_feasible(mk_route({1, 3, 2, 4}), tight).feasible);

  // a dropoff window that closes before any vehicle can drive there
  const RSInstance late = make_inst(
      {{0, NodeKind::Depot, {0.0, 0.0}, 0.0, 100.0, 0.0, -1, -1},
       {1, NodeKind::Origin, {0.0, 0.0}, 0.0, 10.0, 1.0, 1, -1},
       {6, NodeKind::Destination, {10.0, 0.0}, 0.0, 4.0, 1.0, 1, -1}},
      {{1, {1}, {6}}});
  CHECK_FALSE(route_feasible(mk_route({1, 6}), late).feasible);

  // the depot must still be reachable after the last dropoff
  const RSInstance short_day = two_request_inst(4, 3.0);
  CHECK_FALSE(route_feasible(mk_route({1, 3}), short_day).feasible);
}

TEST_CASE("waiting for a window to open is allowed") {
  const RSInstance inst = make_inst(
      {{0, NodeKind::Depot, {0.0, 0.0}, 0.0, 100.0, 0.0, -1, -1},
       {1, NodeKind::Origin, {0.0, 0.0}, 30.0, 40.0, 1.0, 1, -1},
       {6, NodeKind::Destination, {1.0, 0.0}, 0.0, 60.0, 1.0, 1, -1}},
      {{1, {1}, {6}}});
  const Route r = mk_route({1, 6});
  const auto chk = route_feasible(r, inst);
  CHECK(chk.feasible);

  // the recomputed schedule departs at the window start plus service
  RSSolution s;
  s.routes = {r};
  s.chosen.emplace(1, std::make_pair(1, 6));
  s.total_km = route_km(r, inst);
  CHECK(solution_violations(s, inst).empty());
}

TEST_CASE("kilometres ignore depot legs") {
  const RSInstance inst = two_request_inst();
  const double km = route_km(mk_route({1, 3}), inst);
  CHECK(km == doctest::Approx(5.0 * 1.255));
  CHECK(route_km(mk_route({1, 2, 3, 4}), inst) ==
        doctest::Approx((1.0 + 4.0 + 1.0) * 1.255));
}

TEST_CASE("the objective is lexicographic through the vehicle weight") {
  const RSInstance inst = two_request_inst();
  // direct legs: 5 km and 5 km euclidean, circuity applied
  const double w = vehicle_weight(inst);
  CHECK(w == doctest::Approx(10.0 * (5.0 + 5.0) * 1.255));

  RSSolution one, two;
  one.routes = {mk_route({1, 2, 3, 4})};
  one.total_km = route_km(one.routes[0], inst);
  two.routes = {mk_route({1, 3}), mk_route({2, 4})};
  two.total_km = route_km(two.routes[0], inst) + route_km(two.routes[1], inst);
  // any kilometre advantage of the two-vehicle split cannot pay for the bus
  CHECK(solution_cost(one, w) < solution_cost(two, w));

  RSSolution dropped;
  dropped.unassigned = {1, 2};
  CHECK(solution_cost(dropped, w) == doctest::Approx(2.0 * 1000.0 * w));
}

TEST_CASE("greedy construction serves every serveable request") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const RSInstance inst = oracle::random_rs_instance(12, seed, 4, seed == 3 ? 0.5 : 0.0);
    const RSSolution sol = greedy_initial(inst, seed);
    CHECK(sol.unassigned.empty());
    CHECK(sol.chosen.size() == 12);
    CHECK(solution_violations(sol, inst).empty());
  }
}

TEST_CASE("an unserveable request is reported, not hidden") {
  const RSInstance inst = make_inst(
      {{0, NodeKind::Depot, {0.0, 0.0}, 0.0, 100.0, 0.0, -1, -1},
       {1, NodeKind::Origin, {0.0, 0.0}, 0.0, 10.0, 1.0, 1, -1},
       {6, NodeKind::Destination, {10.0, 0.0}, 0.0, 4.0, 1.0, 1, -1}},
      {{1, {1}, {6}}});
  const RSSolution sol = lns_solve(inst, {});
  CHECK(sol.routes.empty());
  CHECK(sol.unassigned == std::vector<int>{1});
  CHECK(solution_violations(sol, inst).empty());
  CHECK(solution_cost(sol, vehicle_weight(inst)) >= 1000.0);
}

TEST_CASE("destroy removes whole requests and repair puts them back") {
  const RSInstance inst = oracle::random_rs_instance(10, 4);
  const RSSolution base = greedy_initial(inst, 9);
  REQUIRE(base.unassigned.empty());
  const double w = vehicle_weight(inst);

  for (RemovalOp op : {RemovalOp::Random, RemovalOp::Worst, RemovalOp::Related}) {
    Rng rng(42);
    const PartialSolution part = destroy(base, 3, op, inst, rng);
    CHECK(part.pool.size() == 3);
    CHECK(part.solution.chosen.size() == 7);
    CHECK(std::is_sorted(part.pool.begin(), part.pool.end()));
    for (int rid : part.pool) CHECK(part.solution.chosen.count(rid) == 0);
    for (const Route& r : part.solution.routes) {
      CHECK_FALSE(r.visits.empty());
      CHECK(route_feasible(r, inst).feasible);
    }

    // identically seeded removals agree
    Rng rng2(42);
    const PartialSolution again = destroy(base, 3, op, inst, rng2);
    CHECK(again.pool == part.pool);

    const RSSolution fixed = repair(part, inst, w);
    CHECK(fixed.unassigned.empty());
    CHECK(fixed.chosen.size() == 10);
    CHECK(solution_violations(fixed, inst).empty());
  }

  // removing more than exists just empties the solution
  Rng rng(1);
  const PartialSolution all = destroy(base, 99, RemovalOp::Random, inst, rng);
  CHECK(all.pool.size() == 10);
  CHECK(all.solution.routes.empty());
}

TEST_CASE("repair retries what the incoming solution had given up on") {
  const RSInstance inst = two_request_inst();
  PartialSolution part;
  part.solution.unassigned = {1, 2};
  const RSSolution fixed = repair(part, inst, vehicle_weight(inst));
  CHECK(fixed.unassigned.empty());
  CHECK(fixed.fleet_size() == 1);  // sharing beats opening a second vehicle
  CHECK(solution_violations(fixed, inst).empty());
}

TEST_CASE("the search matches exhaustive routing on small instances") {
  int matches = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const RSInstance inst = oracle::random_rs_instance(3, seed, 4, seed >= 4 ? 0.5 : 0.0);
    const auto best = oracle::DarpOracle::solve(inst);
    REQUIRE(best.feasible);

    LnsParams params;
    params.seed = seed;
    const RSSolution sol = lns_solve(inst, params);
    CHECK(sol.unassigned.empty());
    CHECK(solution_violations(sol, inst).empty());
    if (sol.fleet_size() == best.vehicles && sol.total_km <= best.km + 1e-6) ++matches;
  }
  CHECK(matches == 5);
}

TEST_CASE("the search is deterministic and the removal cap is safe") {
  const RSInstance inst = oracle::random_rs_instance(15, 8, 4, 0.3);
  LnsParams params;
  params.iterations = 300;
  params.seed = 5;

  const RSSolution a = lns_solve(inst, params);
  const RSSolution b = lns_solve(inst, params);
  CHECK(a.total_km == b.total_km);
  CHECK(a.fleet_size() == b.fleet_size());
  REQUIRE(a.routes.size() == b.routes.size());
  for (std::size_t i = 0; i < a.routes.size(); ++i) {
    REQUIRE(a.routes[i].visits.size() == b.routes[i].visits.size());
    for (std::size_t j = 0; j < a.routes[i].visits.size(); ++j)
      CHECK(a.routes[i].visits[j].node == b.routes[i].visits[j].node);
  }

  params.removal_cap = 1;  // degenerate cap must not break the search
  const RSSolution c = lns_solve(inst, params);
  CHECK(solution_violations(c, inst).empty());
  CHECK(c.unassigned.empty());

  params.removal_cap = -1;  // uncapped
  const RSSolution d = lns_solve(inst, params);
  CHECK(solution_violations(d, inst).empty());
}

TEST_CASE("alternatives let one vehicle pick the convenient door") {
  // one request with two pickup alternatives; the second sits on the path of
  // another request, so the optimum uses it
  const RSInstance inst = make_inst(
      {{0, NodeKind::Depot, {0.0, 0.0}, 0.0, 300.0, 0.0, -1, -1},
       {1, NodeKind::Origin, {0.0, 0.0}, 0.0, 200.0, 1.0, 1, -1},
       {2, NodeKind::Origin, {0.0, 8.0}, 0.0, 200.0, 1.0, 2, -1},
       {21, NodeKind::Transfer, {1.0, 0.0}, 0.0, 200.0, 1.0, 2, -1},
       {3, NodeKind::Destination, {5.0, 0.0}, 0.0, 280.0, 1.0, 1, -1},
       {4, NodeKind::Destination, {6.0, 0.0}, 0.0, 280.0, 1.0, 2, -1}},
      {{1, {1}, {3}}, {2, {2, 21}, {4}}});
  const auto best = oracle::DarpOracle::solve(inst);
  REQUIRE(best.feasible);
  CHECK(best.vehicles == 1);

  LnsParams params;
  params.iterations = 500;
  const RSSolution sol = lns_solve(inst, params);
  REQUIRE(sol.unassigned.empty());
  CHECK(sol.fleet_size() == 1);
  CHECK(sol.total_km == doctest::Approx(best.km));
  CHECK(sol.chosen.at(2).first == 21);
}
