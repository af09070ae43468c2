#include "ptmod/pt_network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <unordered_set>

#include "ptmod/rng.hpp"

namespace ptmod {

void validate_network(const PotentialNetwork& net) {
  const int n_stops = static_cast<int>(net.stop_points.size());
  for (std::size_t l = 0; l < net.lines.size(); ++l) {
    const auto& line = net.lines[l];
    if (line.stops.size() < 2)
      throw std::invalid_argument("line " + std::to_string(l) + " has fewer than two stops");
    std::unordered_set<int> seen;
    for (int s : line.stops) {
      if (s < 0 || s >= n_stops)
        throw std::invalid_argument("line " + std::to_string(l) + " references unknown stop " +
                                    std::to_string(s));
      if (!seen.insert(s).second)
        throw std::invalid_argument("line " + std::to_string(l) + " repeats stop " +
                                    std::to_string(s));
    }
  }
}

bool operator==(const Layout& a, const Layout& b) {
  return a.active == b.active && a.vehicles == b.vehicles;
}

std::uint64_t layout_hash(const Layout& layout) {
  std::uint64_t h = 0x6d6f64756c757321ULL;
  for (const auto& line : layout.active) {
    h = mix64(h, line.size());
    for (auto bit : line) h = mix64(h, bit);
  }
  for (int n : layout.vehicles) h = mix64(h, static_cast<std::uint64_t>(n) + 1);
  return h;
}

PTGraph activate(const PotentialNetwork& net, const Layout& layout, const PTConfig& cfg,
                 const std::vector<double>& dwell_override) {
  if (layout.active.size() != net.lines.size() || layout.vehicles.size() != net.lines.size())
    throw std::invalid_argument("layout line count does not match the network");
  if (!dwell_override.empty() && dwell_override.size() != net.stop_points.size())
    throw std::invalid_argument("dwell override size does not match the stop table");

  PTGraph g;
  g.line_stops.resize(net.lines.size());
  for (std::size_t l = 0; l < net.lines.size(); ++l) {
    const auto& line = net.lines[l];
    if (layout.active[l].size() != line.stops.size())
      throw std::invalid_argument("layout bits for line " + std::to_string(l) +
                                  " do not match its stop count");
    std::vector<int> active;
    for (std::size_t i = 0; i < line.stops.size(); ++i)
      if (layout.active[l][i]) active.push_back(line.stops[i]);
    // a line needs at least two stops to operate; otherwise it contributes
    // neither arcs nor stops
    if (active.size() < 2) continue;
    g.line_stops[l] = active;
    for (int s : active) {
      if (!g.points.count(s)) {
        g.points.emplace(s, net.stop_points[static_cast<std::size_t>(s)]);
        g.dwell_min.emplace(s, dwell_override.empty()
                                   ? cfg.dwell_min
                                   : dwell_override[static_cast<std::size_t>(s)]);
      }
    }
    for (std::size_t i = 0; i + 1 < active.size(); ++i) {
      g.arcs.push_back({active[i], active[i + 1], static_cast<int>(l)});
      g.arcs.push_back({active[i + 1], active[i], static_cast<int>(l)});
    }
  }
  g.stops.reserve(g.points.size());
  for (const auto& [id, _] : g.points) g.stops.push_back(id);
  std::sort(g.stops.begin(), g.stops.end());
  return g;
}

namespace {

const std::vector<int>& line_or_throw(const PTGraph& g, int line) {
  if (line < 0 || line >= static_cast<int>(g.line_stops.size()))
    throw std::invalid_argument("unknown line " + std::to_string(line));
  return g.line_stops[static_cast<std::size_t>(line)];
}

int position_on_line(const std::vector<int>& stops, int stop, int line) {
  auto it = std::find(stops.begin(), stops.end(), stop);
  if (it == stops.end())
    throw std::invalid_argument("stop " + std::to_string(stop) + " is not active on line " +
                                std::to_string(line));
  return static_cast<int>(it - stops.begin());
}

}  // namespace

double line_end_to_end_min(const PTGraph& g, int line, const PTConfig& cfg) {
  const auto& stops = line_or_throw(g, line);
  double t = 0.0;
  for (std::size_t i = 0; i + 1 < stops.size(); ++i)
    t += segment_time_min(g.point(stops[i]), g.point(stops[i + 1]), cfg);
  for (int s : stops) t += g.dwell(s);
  return t;
}

double line_time_min(const PTGraph& g, int line, int u, int v, double freq, const PTConfig& cfg) {
  if (freq <= 0.0)
    throw std::invalid_argument("line " + std::to_string(line) + " is not operating");
  const auto& stops = line_or_throw(g, line);
  const int pu = position_on_line(stops, u, line);
  const int pv = position_on_line(stops, v, line);
  double t = 1.0 / (2.0 * freq);
  const int step = pv >= pu ? 1 : -1;
  for (int i = pu; i != pv; i += step) {
    const int a = stops[static_cast<std::size_t>(i)];
    const int b = stops[static_cast<std::size_t>(i + step)];
    t += segment_time_min(g.point(a), g.point(b), cfg);
    t += g.dwell(b);  // dwell at every traversed stop after u, v included
  }
  return t;
}

FleetBounds fleet_bounds(double line_time, const PTConfig& cfg) {
  FleetBounds b;
  b.n_min = static_cast<int>(std::ceil(2.0 * line_time * cfg.freq_floor_per_min));
  b.n_min = std::max(b.n_min, 1);
  b.n_max = static_cast<int>(std::floor(2.0 * line_time * cfg.freq_cap_per_min));
  b.n_max = std::max(b.n_max, b.n_min);
  return b;
}

LineMultigraph build_multigraph(const PTGraph& g, const std::vector<double>& freq_per_line,
                                const PTConfig& cfg) {
  if (freq_per_line.size() != g.line_stops.size())
    throw std::invalid_argument("frequency vector does not match the line count");

  LineMultigraph mg;
  mg.stops = g.stops;
  for (std::size_t i = 0; i < mg.stops.size(); ++i)
    mg.index_of.emplace(mg.stops[i], static_cast<int>(i));
  mg.out.resize(mg.stops.size());

  for (std::size_t l = 0; l < g.line_stops.size(); ++l) {
    const auto& stops = g.line_stops[l];
    if (stops.size() < 2) continue;
    const double f = freq_per_line[l];
    if (f <= 0.0)
      throw std::invalid_argument("line " + std::to_string(l) +
                                  " has active stops but no frequency");
    const double wait = 1.0 / (2.0 * f);

    // prefix sums over the active sequence: segment minutes and dwell minutes
    const std::size_t m = stops.size();
    std::vector<double> seg(m, 0.0);
    std::vector<double> dwell0(m, 0.0);  // cumulative dwell including stop 0
    dwell0[0] = g.dwell(stops[0]);
    for (std::size_t i = 1; i < m; ++i) {
      seg[i] = seg[i - 1] + segment_time_min(g.point(stops[i - 1]), g.point(stops[i]), cfg);
      dwell0[i] = dwell0[i - 1] + g.dwell(stops[i]);
    }

    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        if (a == b) continue;
        double minutes = wait + std::abs(seg[b] - seg[a]);
        if (b > a)
          minutes += dwell0[b] - dwell0[a];  // stops a+1..b
        else
          minutes += dwell0[a - 1] - (b > 0 ? dwell0[b - 1] : 0.0);  // stops b..a-1
        mg.out[static_cast<std::size_t>(mg.index_of.at(stops[a]))].push_back(
            {stops[a], stops[b], static_cast<int>(l), minutes});
      }
    }
  }
  return mg;
}

namespace {

struct DijkstraLabel {
  double time = kInf;
  int changes = 0;
  std::vector<int> line_seq;
  int prev_state = -1;
  int via_line = -1;
};

// three-way comparison of (time, changes, line sequence)
int label_cmp(double t1, int c1, const std::vector<int>& s1, double t2, int c2,
              const std::vector<int>& s2) {
  if (t1 != t2) return t1 < t2 ? -1 : 1;
  if (c1 != c2) return c1 < c2 ? -1 : 1;
  if (s1 != s2) return s1 < s2 ? -1 : 1;
  return 0;
}

}  // namespace

PathResult shortest_pt_path(int from, int to, const LineMultigraph& mg, const PTConfig& cfg) {
  PathResult res;
  if (!mg.has_stop(from) || !mg.has_stop(to)) return res;
  if (from == to) {
    res.reachable = true;
    res.total_min = cfg.ingress_min + cfg.egress_min;
    return res;
  }

  const int n = static_cast<int>(mg.stops.size());
  const int n_lines = [&] {
    int ml = 0;
    for (const auto& arcs : mg.out)
      for (const auto& a : arcs) ml = std::max(ml, a.line + 1);
    return ml;
  }();
  // states: stop * (n_lines + 1) + (line + 1); line = -1 means not boarded yet
  const auto state_of = [&](int stop_idx, int line) {
    return stop_idx * (n_lines + 1) + line + 1;
  };
  std::vector<DijkstraLabel> labels(static_cast<std::size_t>(n) * (n_lines + 1));

  using QEntry = std::pair<double, int>;  // (time, state)
  std::priority_queue<QEntry, std::vector<QEntry>, std::greater<>> queue;

  const int src = state_of(mg.index_of.at(from), -1);
  labels[static_cast<std::size_t>(src)].time = 0.0;
  queue.push({0.0, src});

  while (!queue.empty()) {
    const auto [t, state] = queue.top();
    queue.pop();
    auto& cur = labels[static_cast<std::size_t>(state)];
    if (t > cur.time) continue;
    const int stop_idx = state / (n_lines + 1);
    const int line = state % (n_lines + 1) - 1;
    for (const auto& arc : mg.out[static_cast<std::size_t>(stop_idx)]) {
      const double change = (line >= 0 && arc.line != line) ? cfg.change_min : 0.0;
      const double nt = cur.time + change + arc.minutes;
      const int nc = cur.changes + ((line >= 0 && arc.line != line) ? 1 : 0);
      const int ns = state_of(mg.index_of.at(arc.to), arc.line);
      auto& nl = labels[static_cast<std::size_t>(ns)];
      // one sequence entry per leg, so equal change counts mean equal lengths
      std::vector<int> seq = cur.line_seq;
      if (seq.empty() || seq.back() != arc.line) seq.push_back(arc.line);
      if (label_cmp(nt, nc, seq, nl.time, nl.changes, nl.line_seq) < 0) {
        nl.time = nt;
        nl.changes = nc;
        nl.line_seq = std::move(seq);
        nl.prev_state = state;
        nl.via_line = arc.line;
        queue.push({nt, ns});
      }
    }
  }

  // best terminal state at the target stop
  const int to_idx = mg.index_of.at(to);
  int best_state = -1;
  for (int line = 0; line < n_lines; ++line) {
    const int s = state_of(to_idx, line);
    const auto& lab = labels[static_cast<std::size_t>(s)];
    if (lab.time == kInf) continue;
    if (best_state < 0) {
      best_state = s;
      continue;
    }
    const auto& cur = labels[static_cast<std::size_t>(best_state)];
    if (label_cmp(lab.time, lab.changes, lab.line_seq, cur.time, cur.changes, cur.line_seq) < 0)
      best_state = s;
  }
  if (best_state < 0) return res;

  // walk the predecessor chain, then merge consecutive same-line arcs into legs
  std::vector<std::pair<int, int>> arc_chain;  // (state, prev_state)
  for (int s = best_state; labels[static_cast<std::size_t>(s)].prev_state >= 0;
       s = labels[static_cast<std::size_t>(s)].prev_state)
    arc_chain.emplace_back(s, labels[static_cast<std::size_t>(s)].prev_state);
  std::reverse(arc_chain.begin(), arc_chain.end());

  for (const auto& [state, prev] : arc_chain) {
    const int stop_idx = state / (n_lines + 1);
    const int prev_idx = prev / (n_lines + 1);
    const int line = labels[static_cast<std::size_t>(state)].via_line;
    const double minutes = labels[static_cast<std::size_t>(state)].time -
                           labels[static_cast<std::size_t>(prev)].time;
    if (!res.legs.empty() && res.legs.back().line == line) {
      res.legs.back().to = mg.stops[static_cast<std::size_t>(stop_idx)];
      res.legs.back().minutes += minutes;
    } else {
      double leg_min = minutes;
      if (!res.legs.empty()) leg_min -= cfg.change_min;
      res.legs.push_back({mg.stops[static_cast<std::size_t>(prev_idx)],
                          mg.stops[static_cast<std::size_t>(stop_idx)], line, leg_min});
    }
  }

  res.reachable = true;
  res.total_min = cfg.ingress_min + labels[static_cast<std::size_t>(best_state)].time +
                  cfg.egress_min;
  return res;
}

PairTimeMatrix pair_time_matrix(const LineMultigraph& mg, const PTConfig& cfg) {
  PairTimeMatrix m;
  m.stops = mg.stops;
  m.index_of = mg.index_of;
  const std::size_t n = m.stops.size();
  m.minutes.assign(n * n, kInf);

  const int n_lines = [&] {
    int ml = 0;
    for (const auto& arcs : mg.out)
      for (const auto& a : arcs) ml = std::max(ml, a.line + 1);
    return ml;
  }();

  // plain time-only Dijkstra per source over (stop, boarded line) states
  std::vector<double> dist(n * static_cast<std::size_t>(n_lines + 1));
  for (std::size_t src = 0; src < n; ++src) {
    std::fill(dist.begin(), dist.end(), kInf);
    using QEntry = std::pair<double, int>;
    std::priority_queue<QEntry, std::vector<QEntry>, std::greater<>> queue;
    const auto state_of = [&](int stop_idx, int line) {
      return stop_idx * (n_lines + 1) + line + 1;
    };
    const int s0 = state_of(static_cast<int>(src), -1);
    dist[static_cast<std::size_t>(s0)] = 0.0;
    queue.push({0.0, s0});
    while (!queue.empty()) {
      const auto [t, state] = queue.top();
      queue.pop();
      if (t > dist[static_cast<std::size_t>(state)]) continue;
      const int stop_idx = state / (n_lines + 1);
      const int line = state % (n_lines + 1) - 1;
      for (const auto& arc : mg.out[static_cast<std::size_t>(stop_idx)]) {
        const double change = (line >= 0 && arc.line != line) ? cfg.change_min : 0.0;
        const double nt = t + change + arc.minutes;
        const int ns = state_of(mg.index_of.at(arc.to), arc.line);
        if (nt < dist[static_cast<std::size_t>(ns)]) {
          dist[static_cast<std::size_t>(ns)] = nt;
          queue.push({nt, ns});
        }
      }
    }
    for (std::size_t dst = 0; dst < n; ++dst) {
      if (dst == src) {
        m.minutes[src * n + dst] = cfg.ingress_min + cfg.egress_min;
        continue;
      }
      double best = kInf;
      for (int line = 0; line < n_lines; ++line)
        best = std::min(best, dist[static_cast<std::size_t>(state_of(static_cast<int>(dst), line))]);
      if (best < kInf) m.minutes[src * n + dst] = cfg.ingress_min + best + cfg.egress_min;
    }
  }
  return m;
}

}  // namespace ptmod
