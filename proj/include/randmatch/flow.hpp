#pragma once

#include "randmatch/instance.hpp"
#include "randmatch/perturbation.hpp"
#include "randmatch/types.hpp"

namespace randmatch {

/// Fixed-point scale for arc costs: one unit is 1e-9 in similarity terms.
inline constexpr std::int64_t kCostScale = 1000000000;

/// Wide accumulator for cost totals so no sum of arc costs can overflow.
using CostTotal = __int128;

/// A maximal group of parallel paper->reviewer arcs sharing one cost.
/// Each arc in the group has the given unit capacity.
struct CostRun {
  std::int64_t cost = 0;   // fixed-point, see kCostScale
  std::int64_t count = 0;  // number of unit arcs at this cost
};

/// Parallel arcs of one (paper, reviewer) pair, run-length compressed in
/// nonincreasing cost order. A concave perturbation yields nonincreasing
/// increments, so this order is the natural one.
struct PairArcs {
  std::vector<CostRun> runs;
  std::int64_t total_capacity() const {
    std::int64_t t = 0;
    for (const CostRun& run : runs) t += run.count;
    return t;
  }
};

/// Bipartite network: source -> papers -> reviewers -> sink. Source and sink
/// arcs carry zero cost; all cost lives on the pair arcs.
struct FlowNetwork {
  int num_papers = 0;
  int num_reviewers = 0;
  std::vector<std::int64_t> paper_supply;       // source -> paper capacities
  std::vector<std::int64_t> reviewer_capacity;  // reviewer -> sink capacities

  FlowNetwork() = default;
  FlowNetwork(int papers, int reviewers)
      : num_papers(papers),
        num_reviewers(reviewers),
        paper_supply(papers, 0),
        reviewer_capacity(reviewers, 0),
        pair_arcs_(std::size_t(papers) * reviewers) {}

  PairArcs& arcs(int p, int r) { return pair_arcs_[std::size_t(p) * num_reviewers + r]; }
  const PairArcs& arcs(int p, int r) const {
    return pair_arcs_[std::size_t(p) * num_reviewers + r];
  }

 private:
  std::vector<PairArcs> pair_arcs_;
};

struct FlowResult {
  IntMatrix units;          // flow on each (paper, reviewer) pair
  std::int64_t flow_value = 0;
  CostTotal total_cost = 0;  // fixed-point
  long long augmentations = 0;
};

/// Scaled network for the piecewise-linear perturbed objective: paper supply
/// demand*w, reviewer capacity cap*w, and floor(cap*w) unit arcs per pair
/// where the i-th arc costs similarity * [f(i/w) - f((i-1)/w)] in fixed
/// point. Throws Errc::cap_too_small when floor(cap*w) = 0.
FlowNetwork build_pm_network(const ProblemInstance& inst, const Rational& cap,
                             const PerturbationFunction& f, int precision);

/// Among all maximum flows, returns one of maximum total cost. Deterministic:
/// successive shortest paths with potentials, ties broken by lowest node
/// index. Costs may be negative.
FlowResult max_cost_max_flow(const FlowNetwork& net);

}  // namespace randmatch
