#include "randmatch/flow.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <queue>

namespace randmatch {

FlowNetwork build_pm_network(const ProblemInstance& inst, const Rational& cap,
                             const PerturbationFunction& f, int precision) {
  if (cap.num <= 0 || Rational(1, 1) < cap)
    throw Error(Errc::invalid_cap, "cap must lie in (0, 1]");
  if (precision < 1) throw Error(Errc::invalid_parameter, "precision must be >= 1");
  const std::int64_t arcs_per_pair = cap.floor_times(precision);
  if (arcs_per_pair == 0)
    throw Error(Errc::cap_too_small,
                "floor(cap * precision) = 0; raise the precision or the cap");

  const int w = precision;
  FlowNetwork net(inst.num_papers, inst.num_reviewers);
  for (int p = 0; p < inst.num_papers; ++p)
    net.paper_supply[p] = std::int64_t(inst.paper_demand) * w;
  for (int r = 0; r < inst.num_reviewers; ++r)
    net.reviewer_capacity[r] = std::int64_t(inst.reviewer_capacity) * w;

  // Increment table is shared by every pair with the same similarity scale.
  std::vector<double> increments(arcs_per_pair);
  for (std::int64_t i = 1; i <= arcs_per_pair; ++i)
    increments[i - 1] = f.value(double(i) / w) - f.value(double(i - 1) / w);

  for (int p = 0; p < inst.num_papers; ++p) {
    for (int r = 0; r < inst.num_reviewers; ++r) {
      const double s = inst.similarity(p, r);
      PairArcs& bundle = net.arcs(p, r);
      std::int64_t prev = std::numeric_limits<std::int64_t>::max();
      for (std::int64_t i = 1; i <= arcs_per_pair; ++i) {
        double inc;
        if (f.per_pair())
          inc = f.value(double(i) / w, s) - f.value(double(i - 1) / w, s);
        else
          inc = increments[i - 1];
        std::int64_t c = std::llround(s * inc * double(kCostScale));
        // Rounding can break the nonincreasing order by one unit; clamp so
        // the run invariant holds exactly.
        c = std::min(c, prev);
        prev = c;
        if (!bundle.runs.empty() && bundle.runs.back().cost == c)
          ++bundle.runs.back().count;
        else
          bundle.runs.push_back({c, 1});
      }
    }
  }
  return net;
}

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// Arc kinds recorded on the Dijkstra predecessor chain.
enum class Step { source_fwd, source_bwd, pair_fwd, pair_bwd, sink_fwd, sink_bwd };

struct Solver {
  const FlowNetwork& net;
  int P, R, N, s, t;

  std::vector<std::int64_t> used_source, used_sink;
  std::vector<std::int64_t> used_pair;                // flow per pair
  std::vector<std::vector<std::int64_t>> prefix;      // cumulative run counts per pair
  std::vector<std::int64_t> pot, dist;
  std::vector<int> parent;
  std::vector<Step> parent_step;
  long long augmentations = 0;

  explicit Solver(const FlowNetwork& n)
      : net(n),
        P(n.num_papers),
        R(n.num_reviewers),
        N(P + R + 2),
        s(0),
        t(P + R + 1),
        used_source(P, 0),
        used_sink(R, 0),
        used_pair(std::size_t(P) * R, 0),
        prefix(std::size_t(P) * R),
        pot(N, 0),
        dist(N, kInf),
        parent(N, -1),
        parent_step(N, Step::source_fwd) {
    for (int p = 0; p < P; ++p)
      for (int r = 0; r < R; ++r) {
        const auto& runs = net.arcs(p, r).runs;
        auto& pre = prefix[pair_index(p, r)];
        pre.resize(runs.size() + 1);
        pre[0] = 0;
        for (std::size_t k = 0; k < runs.size(); ++k) {
          assert(runs[k].count > 0);
          assert(k == 0 || runs[k].cost < runs[k - 1].cost);
          pre[k + 1] = pre[k] + runs[k].count;
        }
      }
  }

  std::size_t pair_index(int p, int r) const { return std::size_t(p) * R + r; }

  // Run containing arc index `pos` (0-based) of the pair.
  std::size_t run_of(const std::vector<std::int64_t>& pre, std::int64_t pos) const {
    const auto it = std::upper_bound(pre.begin(), pre.end(), pos);
    return std::size_t(it - pre.begin()) - 1;
  }

  // Cheapest unused forward arc (min-cost convention: negated cost), with the
  // number of identically priced units left in its run.
  bool forward_arc(int p, int r, std::int64_t* cost, std::int64_t* avail) const {
    const std::size_t idx = pair_index(p, r);
    const auto& pre = prefix[idx];
    const std::int64_t used = used_pair[idx];
    if (pre.empty() || used >= pre.back()) return false;
    const std::size_t k = run_of(pre, used);
    *cost = -net.arcs(p, r).runs[k].cost;
    *avail = pre[k + 1] - used;
    return true;
  }

  // Cheapest reverse arc = cancel the most recently used unit.
  bool backward_arc(int p, int r, std::int64_t* cost, std::int64_t* avail) const {
    const std::size_t idx = pair_index(p, r);
    const std::int64_t used = used_pair[idx];
    if (used == 0) return false;
    const auto& pre = prefix[idx];
    const std::size_t k = run_of(pre, used - 1);
    *cost = net.arcs(p, r).runs[k].cost;
    *avail = used - pre[k];
    return true;
  }

  int paper_node(int p) const { return 1 + p; }
  int reviewer_node(int r) const { return 1 + P + r; }

  void bellman_ford_potentials() {
    std::vector<std::int64_t> d(N, kInf);
    d[s] = 0;
    bool changed = true;
    int rounds = 0;
    while (changed && rounds++ <= N) {
      changed = false;
      for (int p = 0; p < P; ++p) {
        if (net.paper_supply[p] > 0 && d[s] < kInf && d[s] < d[paper_node(p)]) {
          d[paper_node(p)] = d[s];
          changed = true;
        }
      }
      for (int p = 0; p < P; ++p) {
        if (d[paper_node(p)] >= kInf) continue;
        for (int r = 0; r < R; ++r) {
          const auto& runs = net.arcs(p, r).runs;
          if (runs.empty()) continue;
          const std::int64_t nd = d[paper_node(p)] - runs[0].cost;
          if (nd < d[reviewer_node(r)]) {
            d[reviewer_node(r)] = nd;
            changed = true;
          }
        }
      }
      for (int r = 0; r < R; ++r) {
        if (d[reviewer_node(r)] >= kInf || net.reviewer_capacity[r] <= 0) continue;
        if (d[reviewer_node(r)] < d[t]) {
          d[t] = d[reviewer_node(r)];
          changed = true;
        }
      }
    }
    for (int v = 0; v < N; ++v) pot[v] = d[v] >= kInf ? 0 : d[v];
  }

  void relax(std::priority_queue<std::pair<std::int64_t, int>,
                                 std::vector<std::pair<std::int64_t, int>>,
                                 std::greater<>>& heap,
             int u, int v, std::int64_t cost, Step step) {
    const std::int64_t rc = cost + pot[u] - pot[v];
    assert(rc >= 0 && "reduced cost must be nonnegative before augmentation");
    if (dist[u] + rc < dist[v]) {
      dist[v] = dist[u] + rc;
      parent[v] = u;
      parent_step[v] = step;
      heap.emplace(dist[v], v);
    }
  }

  bool dijkstra() {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::priority_queue<std::pair<std::int64_t, int>,
                        std::vector<std::pair<std::int64_t, int>>, std::greater<>>
        heap;
    dist[s] = 0;
    heap.emplace(0, s);
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d != dist[u]) continue;
      if (u == s) {
        for (int p = 0; p < P; ++p)
          if (used_source[p] < net.paper_supply[p])
            relax(heap, s, paper_node(p), 0, Step::source_fwd);
      } else if (u >= 1 && u <= P) {
        const int p = u - 1;
        if (used_source[p] > 0) relax(heap, u, s, 0, Step::source_bwd);
        std::int64_t c, avail;
        for (int r = 0; r < R; ++r)
          if (forward_arc(p, r, &c, &avail))
            relax(heap, u, reviewer_node(r), c, Step::pair_fwd);
      } else if (u >= 1 + P && u < t) {
        const int r = u - 1 - P;
        if (used_sink[r] < net.reviewer_capacity[r]) relax(heap, u, t, 0, Step::sink_fwd);
        std::int64_t c, avail;
        for (int p = 0; p < P; ++p)
          if (backward_arc(p, r, &c, &avail)) relax(heap, u, paper_node(p), c, Step::pair_bwd);
      } else {
        for (int r = 0; r < R; ++r)
          if (used_sink[r] > 0) relax(heap, u, reviewer_node(r), 0, Step::sink_bwd);
      }
    }
    return dist[t] < kInf;
  }

  void update_potentials() {
    const std::int64_t dt = dist[t];
    for (int v = 0; v < N; ++v) pot[v] += std::min(dist[v], dt);
  }

  std::int64_t bottleneck() const {
    std::int64_t delta = kInf;
    int v = t;
    while (v != s) {
      const int u = parent[v];
      std::int64_t c, avail = 0;
      switch (parent_step[v]) {
        case Step::source_fwd: avail = net.paper_supply[v - 1] - used_source[v - 1]; break;
        case Step::source_bwd: avail = used_source[u - 1]; break;
        case Step::pair_fwd: forward_arc(u - 1, v - 1 - P, &c, &avail); break;
        case Step::pair_bwd: backward_arc(v - 1, u - 1 - P, &c, &avail); break;
        case Step::sink_fwd: avail = net.reviewer_capacity[u - 1 - P] - used_sink[u - 1 - P]; break;
        case Step::sink_bwd: avail = used_sink[v - 1 - P]; break;
      }
      delta = std::min(delta, avail);
      v = u;
    }
    return delta;
  }

  void augment(std::int64_t delta) {
    int v = t;
    while (v != s) {
      const int u = parent[v];
      switch (parent_step[v]) {
        case Step::source_fwd: used_source[v - 1] += delta; break;
        case Step::source_bwd: used_source[u - 1] -= delta; break;
        case Step::pair_fwd: used_pair[pair_index(u - 1, v - 1 - P)] += delta; break;
        case Step::pair_bwd: used_pair[pair_index(v - 1, u - 1 - P)] -= delta; break;
        case Step::sink_fwd: used_sink[u - 1 - P] += delta; break;
        case Step::sink_bwd: used_sink[v - 1 - P] -= delta; break;
      }
      v = u;
    }
  }

  FlowResult run() {
    bellman_ford_potentials();
    while (dijkstra()) {
      update_potentials();
      const std::int64_t delta = bottleneck();
      assert(delta > 0);
      augment(delta);
      ++augmentations;
    }
    FlowResult result;
    result.units.resize(P, R);
    CostTotal cost = 0;
    std::int64_t flow = 0;
    for (int p = 0; p < P; ++p) {
      for (int r = 0; r < R; ++r) {
        const std::size_t idx = pair_index(p, r);
        const std::int64_t used = used_pair[idx];
        result.units(p, r) = used;
        const auto& runs = net.arcs(p, r).runs;
        std::int64_t left = used;
        for (std::size_t k = 0; k < runs.size() && left > 0; ++k) {
          const std::int64_t take = std::min(left, runs[k].count);
          cost += CostTotal(runs[k].cost) * take;
          left -= take;
        }
      }
      flow += used_source[p];
    }
    result.flow_value = flow;
    result.total_cost = cost;
    result.augmentations = augmentations;
    return result;
  }
};

}  // namespace

FlowResult max_cost_max_flow(const FlowNetwork& net) { return Solver(net).run(); }

}  // namespace randmatch
