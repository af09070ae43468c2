#include "ptmod/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ptmod {

namespace {

using nlohmann::json;

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string format_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

ScenarioConfig parse_scenario(const std::string& json_text) {
  json j = json::parse(json_text);
  ScenarioConfig sc;

  read_if(j, "name", sc.name);
  read_if(j, "extent_km", sc.extent_km);
  read_if(j, "seed", sc.seed);
  read_if(j, "gamma", sc.gamma);
  read_if(j, "users", sc.users);
  read_if(j, "horizon_min", sc.horizon_min);
  read_if(j, "initial_buses", sc.initial_buses);
  read_if(j, "latest_anchor_prob", sc.latest_anchor_prob);
  read_if(j, "min_slack_min", sc.min_slack_min);
  read_if(j, "gamma_schedule", sc.gamma_schedule);
  read_if(j, "demand_sizes", sc.demand_sizes);

  if (j.contains("stops"))
    for (const auto& p : j.at("stops"))
      sc.network.stop_points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  if (j.contains("lines")) {
    int id = 0;
    for (const auto& l : j.at("lines")) {
      PotentialLine line;
      line.id = id++;
      for (const auto& s : l) line.stops.push_back(s.get<int>());
      sc.network.lines.push_back(std::move(line));
    }
  }
  if (j.contains("zones")) {
    for (const auto& z : j.at("zones")) {
      ZoneSpec zs;
      read_if(z, "name", zs.name);
      read_if(z, "r_inner_km", zs.r_inner_km);
      read_if(z, "r_outer_km", zs.r_outer_km);
      read_if(z, "origin_share", zs.origin_share);
      read_if(z, "destination_share", zs.destination_share);
      sc.zones.push_back(std::move(zs));
    }
  }

  if (j.contains("speeds")) {
    const auto& s = j.at("speeds");
    read_if(s, "pt_kmh", sc.cfg.pt_speed_kmh);
    read_if(s, "car_kmh", sc.cfg.car_speed_kmh);
    read_if(s, "walk_ms", sc.cfg.walk_speed_ms);
  }
  if (j.contains("circuity")) {
    const auto& c = j.at("circuity");
    read_if(c, "car", sc.cfg.car_circuity);
    read_if(c, "walk", sc.cfg.walk_circuity);
  }
  if (j.contains("times")) {
    const auto& t = j.at("times");
    read_if(t, "ingress_min", sc.cfg.ingress_min);
    read_if(t, "egress_min", sc.cfg.egress_min);
    read_if(t, "change_min", sc.cfg.change_min);
    read_if(t, "dwell_min", sc.cfg.dwell_min);
  }
  if (j.contains("frequency")) {
    const auto& f = j.at("frequency");
    read_if(f, "floor_per_min", sc.cfg.freq_floor_per_min);
    read_if(f, "cap_per_min", sc.cfg.freq_cap_per_min);
    read_if(f, "min_headway_min", sc.cfg.min_headway_min);
  }
  if (j.contains("partition")) {
    const auto& p = j.at("partition");
    read_if(p, "max_walk_km", sc.partition.max_walk_km);
    read_if(p, "tau_rs_min", sc.partition.tau_rs_min);
    read_if(p, "k_closest", sc.partition.k_closest);
  }
  if (j.contains("feeder")) {
    const auto& f = j.at("feeder");
    read_if(f, "capacity", sc.instance.capacity);
    read_if(f, "service_min", sc.instance.service_min);
  }
  if (j.contains("lns")) {
    const auto& l = j.at("lns");
    read_if(l, "iterations", sc.lns.iterations);
    read_if(l, "removal_min_share", sc.lns.removal_min_share);
    read_if(l, "removal_max_share", sc.lns.removal_max_share);
    read_if(l, "removal_cap", sc.lns.removal_cap);
    read_if(l, "accept_worse_frac", sc.lns.accept_worse_frac);
    read_if(l, "end_temp_ratio", sc.lns.end_temp_ratio);
  }
  if (j.contains("pso")) {
    const auto& p = j.at("pso");
    read_if(p, "particles", sc.pso.particles);
    read_if(p, "epochs", sc.pso.epochs);
    read_if(p, "c1", sc.pso.c1);
    read_if(p, "c2", sc.pso.c2);
    read_if(p, "cr1", sc.pso.cr1);
    read_if(p, "cr2", sc.pso.cr2);
    read_if(p, "cr3", sc.pso.cr3);
    read_if(p, "beta", sc.pso.beta);
    read_if(p, "threads", sc.pso.threads);
  }

  // keep the shared access knobs in sync with the partition block
  sc.instance.k_transfer = sc.partition.k_closest;
  sc.instance.max_walk_km = sc.partition.max_walk_km;
  sc.instance.horizon_min = sc.horizon_min;
  return sc;
}

std::vector<std::string> validate_scenario(const ScenarioConfig& sc) {
  std::vector<std::string> bad;
  const auto need = [&](bool ok, const std::string& msg) {
    if (!ok) bad.push_back(msg);
  };

  need(!sc.network.stop_points.empty(), "no stops defined");
  need(!sc.network.lines.empty(), "no lines defined");
  try {
    validate_network(sc.network);
  } catch (const std::exception& e) {
    bad.emplace_back(e.what());
  }
  need(!sc.zones.empty(), "no demand zones defined");
  for (const auto& z : sc.zones) {
    need(z.r_outer_km > z.r_inner_km, "zone " + z.name + " has an empty radius band");
    need(z.origin_share >= 0.0 && z.destination_share >= 0.0,
         "zone " + z.name + " has a negative share");
  }
  need(sc.cfg.pt_speed_kmh > 0 && sc.cfg.car_speed_kmh > 0 && sc.cfg.walk_speed_ms > 0,
       "speeds must be positive");
  need(sc.cfg.car_circuity >= 1.0 && sc.cfg.walk_circuity >= 1.0, "circuity must be >= 1");
  need(sc.cfg.freq_floor_per_min > 0 && sc.cfg.freq_cap_per_min >= sc.cfg.freq_floor_per_min,
       "frequency band is empty");
  need(sc.cfg.dwell_min >= 0, "dwell must be non-negative");
  need(sc.partition.max_walk_km > 0, "walking budget must be positive");
  need(sc.partition.tau_rs_min >= 0, "assumed feeder time must be non-negative");
  need(sc.partition.k_closest >= 1, "k_closest must be at least 1");
  need(sc.instance.capacity >= 1, "feeder capacity must be at least 1");
  need(sc.instance.service_min >= 0, "service time must be non-negative");
  need(sc.horizon_min > 0, "horizon must be positive");
  need(sc.initial_buses >= 1, "initial bus pool must be at least 1");
  need(sc.latest_anchor_prob >= 0 && sc.latest_anchor_prob <= 1,
       "latest_anchor_prob must be within [0, 1]");
  need(sc.gamma >= 1.0, "gamma must be at least 1");
  for (double g : sc.gamma_schedule) need(g >= 1.0, "gamma schedule entries must be at least 1");
  for (int n : sc.demand_sizes) need(n >= 1, "demand sizes must be positive");
  need(sc.users >= 1, "users must be positive");
  need(sc.min_slack_min > sc.instance.service_min,
       "min slack must exceed the feeder service time or door-to-door trips cannot be scheduled");
  need(sc.lns.iterations >= 0, "lns iterations must be non-negative");
  need(sc.lns.removal_min_share > 0 && sc.lns.removal_max_share >= sc.lns.removal_min_share &&
           sc.lns.removal_max_share <= 1.0,
       "removal share band is invalid");
  need(sc.lns.removal_cap != 0, "removal cap must be positive, or negative for no cap");
  need(sc.pso.particles >= 1, "pso needs at least one particle");
  need(sc.pso.epochs >= 1, "pso needs at least one epoch");
  need(sc.pso.beta >= 0, "beta must be non-negative");
  return bad;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  ScenarioConfig sc = parse_scenario(buf.str());
  const auto bad = validate_scenario(sc);
  if (!bad.empty()) {
    std::string msg = "invalid config " + path + ":";
    for (const auto& b : bad) msg += "\n  - " + b;
    throw std::runtime_error(msg);
  }
  return sc;
}

Layout initial_layout(const ScenarioConfig& sc) {
  Layout ly;
  ly.active.resize(sc.network.lines.size());
  ly.vehicles.assign(sc.network.lines.size(), 0);
  for (std::size_t l = 0; l < sc.network.lines.size(); ++l)
    ly.active[l].assign(sc.network.lines[l].stops.size(), 1);

  const PTGraph g = activate(sc.network, ly, sc.cfg);
  std::vector<double> t(sc.network.lines.size(), 0.0);
  double t_sum = 0.0;
  for (std::size_t l = 0; l < t.size(); ++l) {
    t[l] = line_end_to_end_min(g, static_cast<int>(l), sc.cfg);
    t_sum += t[l];
  }

  // largest remainder split of the bus pool, proportional to line time
  std::vector<double> ideal(t.size(), 0.0);
  int assigned = 0;
  for (std::size_t l = 0; l < t.size(); ++l) {
    ideal[l] = t_sum > 0 ? sc.initial_buses * t[l] / t_sum : 0.0;
    ly.vehicles[l] = static_cast<int>(std::floor(ideal[l]));
    assigned += ly.vehicles[l];
  }
  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ra = ideal[a] - std::floor(ideal[a]);
    const double rb = ideal[b] - std::floor(ideal[b]);
    return ra != rb ? ra > rb : a < b;
  });
  for (std::size_t i = 0; assigned < sc.initial_buses && i < order.size(); ++i, ++assigned)
    ++ly.vehicles[order[i]];

  for (std::size_t l = 0; l < t.size(); ++l) {
    const auto b = fleet_bounds(t[l], sc.cfg);
    ly.vehicles[l] = std::clamp(ly.vehicles[l], b.n_min, b.n_max);
  }
  return ly;
}

EvalContext make_context(const ScenarioConfig& sc, double gamma, int users) {
  EvalContext ctx;
  ctx.network = sc.network;
  ctx.cfg = sc.cfg;
  ctx.partition = sc.partition;
  ctx.instance = sc.instance;
  ctx.instance.horizon_min = sc.horizon_min;
  ctx.lns = sc.lns;
  ctx.beta = sc.pso.beta;
  // demand positions stay put across gamma so sweeps compare like with like
  DemandParams dp;
  dp.horizon_min = sc.horizon_min;
  dp.gamma = gamma;
  dp.latest_anchor_prob = sc.latest_anchor_prob;
  dp.min_slack_min = sc.min_slack_min;
  ctx.requests =
      generate_requests(users, sc.zones, dp, sc.cfg, mix64(sc.seed, static_cast<std::uint64_t>(users)));
  ctx.seed = mix64(sc.seed, static_cast<std::uint64_t>(users),
                   static_cast<std::uint64_t>(std::llround(gamma * 1000.0)));
  return ctx;
}

namespace {

std::string scenario_id(const ScenarioConfig& sc, double gamma, int users) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s_g%.2f_u%d_s%llu", sc.name.c_str(), gamma, users,
                static_cast<unsigned long long>(sc.seed));
  return buf;
}

// users whose fixed-route ride under the final layout touches each line
std::vector<int> riders_per_line(const ScenarioConfig& sc, const EvalContext& ctx,
                                 const Layout& best) {
  std::vector<int> riders(sc.network.lines.size(), 0);

  const PTGraph g = activate(sc.network, best, sc.cfg);
  std::vector<double> freq(sc.network.lines.size(), 0.0);
  for (std::size_t l = 0; l < freq.size(); ++l)
    if (g.line_stops[l].size() >= 2)
      freq[l] = frequency_per_min(best.vehicles[l],
                                  line_end_to_end_min(g, static_cast<int>(l), sc.cfg));
  const LineMultigraph mg = build_multigraph(g, freq, sc.cfg);
  const PairTimeMatrix times = pair_time_matrix(mg, sc.cfg);
  const PartitionedDemand classes =
      partition_demand(ctx.requests, g, times, ctx.partition, sc.cfg);
  const BuiltInstance built =
      build_instance(classes, ctx.requests, g, times, ctx.instance, sc.cfg);
  LnsParams lns = ctx.lns;
  lns.seed = mix64(ctx.seed, layout_hash(best));
  const RSSolution sol = lns_solve(built.instance, lns);

  const auto count_path = [&](int from, int to, int rid) {
    (void)rid;
    if (from < 0 || to < 0) return;
    const PathResult path = shortest_pt_path(from, to, mg, sc.cfg);
    if (!path.reachable) return;
    std::vector<int> lines;
    for (const auto& leg : path.legs) lines.push_back(leg.line);
    std::sort(lines.begin(), lines.end());
    lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
    for (int l : lines) ++riders[static_cast<std::size_t>(l)];
  };

  for (const auto& r : ctx.requests) {
    const auto it = built.partition.assignment.find(r.id);
    if (it == built.partition.assignment.end()) continue;
    const ModeAssignment& a = it->second;
    switch (a.mode) {
      case ModeClass::Pt:
        count_path(a.ingress_stop, a.egress_stop, r.id);
        break;
      case ModeClass::WalkPtRs: {
        // ride ends at the transfer the feeder actually serves
        const auto ch = sol.chosen.find(r.id);
        if (ch == sol.chosen.end()) break;
        const int transfer = built.instance.node(ch->second.first).stop;
        if (transfer < 0) break;
        // best ingress stop for that transfer
        double best_t = kInf;
        int best_v = -1;
        for (int v : g.stops) {
          if (walk_km(r.origin, g.point(v), sc.cfg) > ctx.partition.max_walk_km) continue;
          const double ride = times.at(v, transfer);
          if (ride == kInf) continue;
          const double t = walk_time_min(r.origin, g.point(v), sc.cfg) + ride;
          if (t < best_t) {
            best_t = t;
            best_v = v;
          }
        }
        count_path(best_v, transfer, r.id);
        break;
      }
      case ModeClass::RsPtWalk: {
        const auto ch = sol.chosen.find(r.id);
        if (ch == sol.chosen.end()) break;
        const int transfer = built.instance.node(ch->second.second).stop;
        if (transfer < 0) break;
        double best_t = kInf;
        int best_v = -1;
        for (int v : g.stops) {
          if (walk_km(g.point(v), r.destination, sc.cfg) > ctx.partition.max_walk_km) continue;
          const double ride = times.at(transfer, v);
          if (ride == kInf) continue;
          const double t = ride + walk_time_min(g.point(v), r.destination, sc.cfg);
          if (t < best_t) {
            best_t = t;
            best_v = v;
          }
        }
        count_path(transfer, best_v, r.id);
        break;
      }
      default:
        break;
    }
  }
  return riders;
}

}  // namespace

RunReport run_single(const ScenarioConfig& sc, double gamma, int users,
                     const std::optional<Layout>& warm) {
  const EvalContext ctx = make_context(sc, gamma, users);
  const Layout y0 = initial_layout(sc);
  const Layout start = warm ? *warm : y0;

  PsoParams params = sc.pso;
  const EvalRecord initial = evaluate_layout(y0, ctx);
  const PsoResult res = run_pso(start, params, ctx);

  RunReport rep;
  rep.scenario_id = scenario_id(sc, gamma, users);
  rep.gamma = gamma;
  rep.users = users;
  rep.seed = sc.seed;
  rep.initial_cost = initial.cost;
  rep.best_cost = res.best.cost;
  rep.best = res.best;
  rep.trace = res.trace;
  rep.gbest_per_epoch = res.gbest_per_epoch;

  const double total = static_cast<double>(ctx.requests.size());
  for (std::size_t i = 0; i < rep.mode_shares.size(); ++i)
    rep.mode_shares[i] = total > 0 ? res.best.class_counts[i] / total : 0.0;

  const auto riders = riders_per_line(sc, ctx, res.best.layout);
  for (std::size_t l = 0; l < sc.network.lines.size(); ++l) {
    LineChange ch;
    ch.line = static_cast<int>(l);
    const auto& bits = res.best.layout.active[l];
    const double skipped =
        static_cast<double>(std::count(bits.begin(), bits.end(), 0)) / bits.size();
    ch.skipped_fraction = skipped;
    ch.vehicles_before = y0.vehicles[l];
    ch.vehicles_after = res.best.layout.vehicles[l];
    const double red =
        y0.vehicles[l] > 0
            ? (y0.vehicles[l] - res.best.layout.vehicles[l]) / static_cast<double>(y0.vehicles[l])
            : 0.0;
    ch.bus_reduction = std::clamp(red, 0.0, 1.0);
    ch.riders = riders[l];
    rep.line_changes.push_back(ch);
  }
  return rep;
}

std::vector<RunReport> gamma_sweep(const ScenarioConfig& sc) {
  std::vector<RunReport> out;
  std::optional<Layout> warm;
  for (double gamma : sc.gamma_schedule) {
    out.push_back(run_single(sc, gamma, sc.users, warm));
    warm = out.back().best.layout;
  }
  return out;
}

std::vector<RunReport> demand_sweep(const ScenarioConfig& sc) {
  std::vector<RunReport> out;
  for (int users : sc.demand_sizes) out.push_back(run_single(sc, sc.gamma, users));
  return out;
}

void emit_reports(const std::vector<RunReport>& reports, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  std::ofstream costs(fs::path(out_dir) / "costs.csv");
  costs << "scenario_id,gamma,users,seed,initial_cost,best_cost,feeder_vehicles,fixed_vehicles,"
           "feeder_km\n";
  for (const auto& r : reports) {
    costs << r.scenario_id << ',' << format_fixed(r.gamma) << ',' << r.users << ',' << r.seed
          << ',' << format_fixed(r.initial_cost) << ',' << format_fixed(r.best_cost) << ','
          << r.best.feeder_vehicles << ',' << r.best.fixed_vehicles << ','
          << format_fixed(r.best.feeder_km) << '\n';
  }

  std::ofstream shares(fs::path(out_dir) / "mode_shares.csv");
  shares << "scenario_id,walk,pt,rs,walk_pt_rs,rs_pt_walk\n";
  for (const auto& r : reports) {
    shares << r.scenario_id;
    for (double s : r.mode_shares) shares << ',' << format_fixed(s);
    shares << '\n';
  }

  std::ofstream lines(fs::path(out_dir) / "layout_changes.csv");
  lines << "scenario_id,line,skipped_stops,bus_reduction,vehicles_before,vehicles_after,riders\n";
  for (const auto& r : reports) {
    for (const auto& ch : r.line_changes) {
      lines << r.scenario_id << ',' << ch.line << ',' << format_fixed(ch.skipped_fraction) << ','
            << format_fixed(ch.bus_reduction) << ',' << ch.vehicles_before << ','
            << ch.vehicles_after << ',' << ch.riders << '\n';
    }
  }

  std::ofstream trace(fs::path(out_dir) / "trace.csv");
  trace << "scenario_id,epoch,particle,cost,feeder_vehicles,fixed_vehicles\n";
  for (const auto& r : reports) {
    for (const auto& row : r.trace) {
      trace << r.scenario_id << ',' << row.epoch << ',' << row.particle << ','
            << format_fixed(row.cost) << ',' << row.feeder_vehicles << ',' << row.fixed_vehicles
            << '\n';
    }
  }
}

void write_partition_csv(const ScenarioConfig& sc, std::ostream& os) {
  const EvalContext ctx = make_context(sc, sc.gamma, sc.users);
  const Layout y0 = initial_layout(sc);
  const PTGraph g = activate(sc.network, y0, sc.cfg);
  std::vector<double> freq(sc.network.lines.size(), 0.0);
  for (std::size_t l = 0; l < freq.size(); ++l)
    if (g.line_stops[l].size() >= 2)
      freq[l] = frequency_per_min(y0.vehicles[l],
                                  line_end_to_end_min(g, static_cast<int>(l), sc.cfg));
  const LineMultigraph mg = build_multigraph(g, freq, sc.cfg);
  const PairTimeMatrix times = pair_time_matrix(mg, sc.cfg);
  const PartitionedDemand classes =
      partition_demand(ctx.requests, g, times, ctx.partition, sc.cfg);

  os << "id,mode,ingress_stop,egress_stop\n";
  for (const auto& r : ctx.requests) {
    const ModeAssignment& a = classes.assignment.at(r.id);
    os << r.id << ',' << mode_name(a.mode) << ',' << a.ingress_stop << ',' << a.egress_stop
       << '\n';
  }
}

std::string summarize_reports(const std::string& in_dir) {
  namespace fs = std::filesystem;
  std::ifstream in(fs::path(in_dir) / "costs.csv");
  if (!in) throw std::runtime_error("no costs.csv under " + in_dir);

  std::ostringstream out;
  std::string line;
  std::getline(in, line);  // header
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 9) continue;
    const double initial = std::stod(cells[4]);
    const double best = std::stod(cells[5]);
    const double saving = initial > 0 ? 100.0 * (initial - best) / initial : 0.0;
    out << cells[0] << ": cost " << format_fixed(initial) << " -> " << format_fixed(best) << " ("
        << format_fixed(saving) << "% saved), feeder=" << cells[6] << ", fixed=" << cells[7]
        << ", km=" << cells[8] << "\n";
    ++rows;
  }
  out << rows << " runs\n";
  return out.str();
}

}  // namespace ptmod
