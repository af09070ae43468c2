#include <benchmark/benchmark.h>

#include "ptmod/scenario.hpp"

using namespace ptmod;

namespace {

struct Fixture {
  ScenarioConfig sc;
  Layout y0;
  PTGraph g;
  std::vector<double> freq;
  LineMultigraph mg;
  PairTimeMatrix times;

  static const Fixture& get() {
    static const Fixture f = [] {
      Fixture x{load_scenario(DESK_JSON), {}, {}, {}, {}, {}};
      x.y0 = initial_layout(x.sc);
      x.g = activate(x.sc.network, x.y0, x.sc.cfg);
      x.freq.assign(x.sc.network.lines.size(), 0.0);
      for (std::size_t l = 0; l < x.freq.size(); ++l)
        x.freq[l] = frequency_per_min(x.y0.vehicles[l],
                                      line_end_to_end_min(x.g, static_cast<int>(l), x.sc.cfg));
      x.mg = build_multigraph(x.g, x.freq, x.sc.cfg);
      x.times = pair_time_matrix(x.mg, x.sc.cfg);
      return x;
    }();
    return f;
  }
};

void bm_pair_time_matrix(benchmark::State& state) {
  const auto& f = Fixture::get();
  for (auto _ : state) benchmark::DoNotOptimize(pair_time_matrix(f.mg, f.sc.cfg));
}
BENCHMARK(bm_pair_time_matrix);

void bm_shortest_path(benchmark::State& state) {
  const auto& f = Fixture::get();
  const int u = f.g.stops.front(), v = f.g.stops.back();
  for (auto _ : state) benchmark::DoNotOptimize(shortest_pt_path(u, v, f.mg, f.sc.cfg));
}
BENCHMARK(bm_shortest_path);

void bm_partition_demand(benchmark::State& state) {
  const auto& f = Fixture::get();
  DemandParams dp;
  dp.horizon_min = f.sc.horizon_min;
  dp.gamma = f.sc.gamma;
  dp.latest_anchor_prob = f.sc.latest_anchor_prob;
  dp.min_slack_min = f.sc.min_slack_min;
  const auto reqs =
      generate_requests(static_cast<int>(state.range(0)), f.sc.zones, dp, f.sc.cfg, 7);
  for (auto _ : state)
    benchmark::DoNotOptimize(partition_demand(reqs, f.g, f.times, f.sc.partition, f.sc.cfg));
}
BENCHMARK(bm_partition_demand)->Arg(100)->Arg(1000);

void bm_lns_solve(benchmark::State& state) {
  const auto& f = Fixture::get();
  DemandParams dp;
  dp.horizon_min = f.sc.horizon_min;
  dp.gamma = f.sc.gamma;
  dp.latest_anchor_prob = f.sc.latest_anchor_prob;
  dp.min_slack_min = f.sc.min_slack_min;
  const auto reqs =
      generate_requests(static_cast<int>(state.range(0)), f.sc.zones, dp, f.sc.cfg, 7);
  const auto pd = partition_demand(reqs, f.g, f.times, f.sc.partition, f.sc.cfg);
  const auto built = build_instance(pd, reqs, f.g, f.times, f.sc.instance, f.sc.cfg);
  LnsParams params = f.sc.lns;
  params.iterations = 100;
  for (auto _ : state) benchmark::DoNotOptimize(lns_solve(built.instance, params));
}
BENCHMARK(bm_lns_solve)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
