#include "ptmod/pso.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace ptmod {

void normalize_layout(const PotentialNetwork& net, const PTConfig& cfg, Layout& layout) {
  const PTGraph g = activate(net, layout, cfg);
  for (std::size_t l = 0; l < net.lines.size(); ++l) {
    if (g.line_stops[l].size() < 2) {
      layout.vehicles[l] = 0;
      continue;
    }
    const auto b = fleet_bounds(line_end_to_end_min(g, static_cast<int>(l), cfg), cfg);
    layout.vehicles[l] = std::clamp(layout.vehicles[l], b.n_min, b.n_max);
  }
}

EvalRecord evaluate_layout(const Layout& layout, const EvalContext& ctx) {
  Layout norm = layout;
  normalize_layout(ctx.network, ctx.cfg, norm);
  const std::uint64_t key = layout_hash(norm);

  {
    std::lock_guard<std::mutex> lock(*ctx.cache_mutex);
    auto it = ctx.cache.find(key);
    if (it != ctx.cache.end() && it->second.layout == norm) return it->second;
  }

  const PTGraph g = activate(ctx.network, norm, ctx.cfg);
  std::vector<double> freq(ctx.network.lines.size(), 0.0);
  for (std::size_t l = 0; l < freq.size(); ++l) {
    if (g.line_stops[l].size() < 2) continue;
    freq[l] = frequency_per_min(norm.vehicles[l],
                                line_end_to_end_min(g, static_cast<int>(l), ctx.cfg));
  }
  const LineMultigraph mg = build_multigraph(g, freq, ctx.cfg);
  const PairTimeMatrix times = pair_time_matrix(mg, ctx.cfg);

  const PartitionedDemand classes =
      partition_demand(ctx.requests, g, times, ctx.partition, ctx.cfg);
  const BuiltInstance built =
      build_instance(classes, ctx.requests, g, times, ctx.instance, ctx.cfg);

  LnsParams lns = ctx.lns;
  lns.seed = mix64(ctx.seed, key);
  const RSSolution sol = lns_solve(built.instance, lns);
  // instance construction keeps every request singly serveable, so a leftover
  // means the design cost would silently undercount vehicles
  if (!sol.unassigned.empty())
    throw std::logic_error("feeder instance produced an unserveable request");

  EvalRecord rec;
  rec.layout = norm;
  rec.feeder_vehicles = sol.fleet_size();
  rec.feeder_km = sol.total_km;
  rec.fixed_vehicles = 0;
  for (int n : norm.vehicles) rec.fixed_vehicles += n;
  rec.cost = static_cast<double>(rec.feeder_vehicles) + ctx.beta * rec.fixed_vehicles;
  rec.class_counts = {static_cast<int>(built.partition.walk.size()),
                      static_cast<int>(built.partition.pt.size()),
                      static_cast<int>(built.partition.rs.size()),
                      static_cast<int>(built.partition.walk_pt_rs.size()),
                      static_cast<int>(built.partition.rs_pt_walk.size())};

  std::lock_guard<std::mutex> lock(*ctx.cache_mutex);
  ctx.cache.emplace(key, rec);
  return rec;
}

std::vector<Particle> init_swarm(const Layout& y0, const PotentialNetwork& net, const PTConfig& cfg,
                                 const PsoParams& params, std::uint64_t seed) {
  if (params.particles < 1) throw std::invalid_argument("swarm needs at least one particle");
  std::vector<Particle> swarm(static_cast<std::size_t>(params.particles));

  for (int p = 0; p < params.particles; ++p) {
    Particle& part = swarm[static_cast<std::size_t>(p)];
    Rng rng(mix64(seed, 0x73776172ULL, static_cast<std::uint64_t>(p)));

    Layout ly;
    ly.active.resize(net.lines.size());
    ly.vehicles.assign(net.lines.size(), 0);
    if (p == 0) {
      ly = y0;
    } else {
      for (std::size_t l = 0; l < net.lines.size(); ++l) {
        ly.active[l].resize(net.lines[l].stops.size());
        for (auto& bit : ly.active[l]) bit = rng.uniform01() < 0.5 ? 1 : 0;
      }
      const PTGraph g = activate(net, ly, cfg);
      for (std::size_t l = 0; l < net.lines.size(); ++l) {
        if (g.line_stops[l].size() < 2) continue;
        const auto b = fleet_bounds(line_end_to_end_min(g, static_cast<int>(l), cfg), cfg);
        ly.vehicles[l] = rng.uniform_int(b.n_min, b.n_max);
      }
    }
    normalize_layout(net, cfg, ly);

    part.position = ly;
    part.best = ly;
    part.best_cost = kInf;
    part.v_off.resize(net.lines.size());
    part.v_on.resize(net.lines.size());
    for (std::size_t l = 0; l < net.lines.size(); ++l) {
      part.v_off[l].assign(net.lines[l].stops.size(), 0.0);
      part.v_on[l].assign(net.lines[l].stops.size(), 0.0);
    }
  }
  return swarm;
}

std::pair<double, double> bit_velocity_update(double v_off, double v_on, bool in_best,
                                              bool in_gbest, double c1, double c2, double r1,
                                              double r2, double inertia) {
  const double d1_on = in_best ? c1 * r1 : -c1 * r1;
  const double d1_off = -d1_on;
  const double d2_on = in_gbest ? c2 * r2 : -c2 * r2;
  const double d2_off = -d2_on;
  return {inertia * v_off + d1_off + d2_off, inertia * v_on + d1_on + d2_on};
}

void bpso_step(Particle& p, const Layout& gbest, const PsoParams& params, Rng& rng) {
  for (std::size_t l = 0; l < p.position.active.size(); ++l) {
    for (std::size_t s = 0; s < p.position.active[l].size(); ++s) {
      const double r1 = rng.uniform01();
      const double r2 = rng.uniform01();
      const double inertia = rng.uniform(-1.0, 1.0);
      const auto [v_off, v_on] =
          bit_velocity_update(p.v_off[l][s], p.v_on[l][s], p.best.active[l][s] != 0,
                              gbest.active[l][s] != 0, params.c1, params.c2, r1, r2, inertia);
      p.v_off[l][s] = v_off;
      p.v_on[l][s] = v_on;
      const double v = p.position.active[l][s] ? v_on : v_off;
      p.position.active[l][s] = rng.uniform01() < sigmoid(v) ? 1 : 0;
    }
  }
}

std::optional<int> vehicle_count_pick(int current, int best, int gbest, double cr1, double cr2,
                                      double cr3, double r1, double r2, double r3) {
  const int aux1 = cr1 * r1 <= 0.5 ? current : best;
  const int aux2 = cr2 * r2 <= 0.5 ? aux1 : gbest;
  if (cr3 * r3 <= 0.5) return aux2;
  return std::nullopt;
}

void dpso_step(Particle& p, const Layout& gbest, const PotentialNetwork& net, const PTConfig& cfg,
               const PsoParams& params, Rng& rng) {
  const PTGraph g = activate(net, p.position, cfg);
  for (std::size_t l = 0; l < p.position.vehicles.size(); ++l) {
    if (g.line_stops[l].size() < 2) {
      p.position.vehicles[l] = 0;
      continue;
    }
    const auto b = fleet_bounds(line_end_to_end_min(g, static_cast<int>(l), cfg), cfg);
    const double r1 = rng.uniform01();
    const double r2 = rng.uniform01();
    const double r3 = rng.uniform01();
    const auto picked =
        vehicle_count_pick(p.position.vehicles[l], p.best.vehicles[l], gbest.vehicles[l],
                           params.cr1, params.cr2, params.cr3, r1, r2, r3);
    const int n = picked ? *picked : rng.uniform_int(b.n_min, b.n_max);
    p.position.vehicles[l] = std::clamp(n, b.n_min, b.n_max);
  }
}

PsoResult run_pso(const Layout& y0, const PsoParams& params, const EvalContext& ctx) {
  auto swarm = init_swarm(y0, ctx.network, ctx.cfg, params, ctx.seed);
  const int n = static_cast<int>(swarm.size());

  PsoResult result;
  Layout gbest_layout;
  double gbest_cost = kInf;
  bool have_gbest = false;

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::vector<EvalRecord> records(static_cast<std::size_t>(n));

    const int workers = std::max(1, params.threads);
    if (workers <= 1 || n <= 1) {
      for (int p = 0; p < n; ++p)
        records[static_cast<std::size_t>(p)] = evaluate_layout(swarm[static_cast<std::size_t>(p)].position, ctx);
    } else {
      std::vector<std::thread> threads;
      std::size_t next = 0;
      std::mutex next_mutex;
      for (int w = 0; w < std::min(workers, n); ++w) {
        threads.emplace_back([&] {
          for (;;) {
            std::size_t idx;
            {
              std::lock_guard<std::mutex> lock(next_mutex);
              if (next >= static_cast<std::size_t>(n)) return;
              idx = next++;
            }
            records[idx] = evaluate_layout(swarm[idx].position, ctx);
          }
        });
      }
      for (auto& t : threads) t.join();
    }

    // barrier: personal and global bests move only here
    for (int p = 0; p < n; ++p) {
      auto& part = swarm[static_cast<std::size_t>(p)];
      const auto& rec = records[static_cast<std::size_t>(p)];
      result.trace.push_back({epoch, p, rec.cost, rec.feeder_vehicles, rec.fixed_vehicles});
      if (rec.cost < part.best_cost) {
        part.best_cost = rec.cost;
        part.best = rec.layout;
      }
      if (!have_gbest || rec.cost < gbest_cost) {
        have_gbest = true;
        gbest_cost = rec.cost;
        gbest_layout = rec.layout;
        result.best = rec;
      }
    }
    result.gbest_per_epoch.push_back(gbest_cost);

    if (epoch + 1 == params.epochs) break;
    for (int p = 0; p < n; ++p) {
      auto& part = swarm[static_cast<std::size_t>(p)];
      Rng rng(mix64(ctx.seed, 0x70657274ULL + static_cast<std::uint64_t>(epoch),
                    static_cast<std::uint64_t>(p)));
      bpso_step(part, gbest_layout, params, rng);
      dpso_step(part, gbest_layout, ctx.network, ctx.cfg, params, rng);
      normalize_layout(ctx.network, ctx.cfg, part.position);
    }
  }
  return result;
}

}  // namespace ptmod
