#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ptmod/darp_lns.hpp"
#include "ptmod/demand.hpp"
#include "ptmod/pt_network.hpp"
#include "ptmod/rs_windows.hpp"

namespace ptmod {

struct PsoParams {
  int particles = 20;
  int epochs = 50;
  double c1 = 2.0;
  double c2 = 2.0;
  double cr1 = 0.55;
  double cr2 = 0.65;
  double cr3 = 0.52;
  double beta = 2.0;  // fixed-route vehicle weight in the design cost
  int threads = 1;
};

struct EvalRecord {
  Layout layout;  // normalized
  double cost = 0.0;
  int feeder_vehicles = 0;
  int fixed_vehicles = 0;  // sum of per-line counts
  double feeder_km = 0.0;
  std::array<int, 5> class_counts{};  // Walk, Pt, Rs, WalkPtRs, RsPtWalk
};

// Everything a layout evaluation needs, frozen for one scenario run.
struct EvalContext {
  PotentialNetwork network;
  PTConfig cfg;
  std::vector<TravelRequest> requests;
  PartitionParams partition;
  InstanceParams instance;
  LnsParams lns;
  double beta = 2.0;
  std::uint64_t seed = 1;

  mutable std::unordered_map<std::uint64_t, EvalRecord> cache;
  mutable std::unique_ptr<std::mutex> cache_mutex = std::make_unique<std::mutex>();
};

// Zeroes vehicle counts of lines with fewer than two active stops and clamps
// the rest into the per-line fleet bounds.
void normalize_layout(const PotentialNetwork& net, const PTConfig& cfg, Layout& layout);

// Full lower-level evaluation of one layout: operated graph, timetable,
// demand split, feeder instance, LNS. Deterministic given (context, layout);
// results are memoized per context.
EvalRecord evaluate_layout(const Layout& layout, const EvalContext& ctx);

struct Particle {
  Layout position;
  Layout best;  // personal best
  double best_cost = kInf;
  std::vector<std::vector<double>> v_off;  // velocity toward deactivation
  std::vector<std::vector<double>> v_on;   // velocity toward activation
};

// Particle 0 starts at y0; the rest draw bits fairly and vehicle counts
// uniformly inside the per-line bounds.
std::vector<Particle> init_swarm(const Layout& y0, const PotentialNetwork& net, const PTConfig& cfg,
                                 const PsoParams& params, std::uint64_t seed);

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Velocity update for one activation bit; returns the pair (v_off, v_on).
// d1/d2 reward agreeing with the personal/global best membership.
std::pair<double, double> bit_velocity_update(double v_off, double v_on, bool in_best,
                                              bool in_gbest, double c1, double c2, double r1,
                                              double r2, double inertia);

// Flips activation bits of the particle position in place.
void bpso_step(Particle& p, const Layout& gbest, const PsoParams& params, Rng& rng);

// Staged crossover pick for one vehicle count; nullopt means the caller must
// fall back to a fresh uniform draw inside the fleet bounds.
std::optional<int> vehicle_count_pick(int current, int best, int gbest, double cr1, double cr2,
                                      double cr3, double r1, double r2, double r3);

// Re-draws vehicle counts in place against the particle/global bests.
void dpso_step(Particle& p, const Layout& gbest, const PotentialNetwork& net, const PTConfig& cfg,
               const PsoParams& params, Rng& rng);

struct TraceRow {
  int epoch = 0;
  int particle = 0;
  double cost = 0.0;
  int feeder_vehicles = 0;
  int fixed_vehicles = 0;
};

struct PsoResult {
  EvalRecord best;
  std::vector<TraceRow> trace;
  std::vector<double> gbest_per_epoch;
};

// Synchronous particle swarm: per epoch, evaluate all particles, then update
// personal and global bests at a barrier, then perturb.
PsoResult run_pso(const Layout& y0, const PsoParams& params, const EvalContext& ctx);

}  // namespace ptmod
