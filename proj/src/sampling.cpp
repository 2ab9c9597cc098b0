#include "randmatch/sampling.hpp"

#include "randmatch/flow.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace randmatch {

namespace {

// One padded entry: real pairs have unit capacity, the dummy row absorbs up
// to the full reviewer capacity.
struct PeelState {
  Matrix residual;   // (num_papers + 1) x num_reviewers, dummy row last
  double weight = 1.0;
};

}  // namespace

AssignmentDistribution decompose(const FractionalAssignment& x, const ProblemInstance& inst) {
  {
    const ValidationReport check = validate_assignment(x, inst);
    if (!check.ok())
      throw Error(Errc::malformed_input,
                  "fractional assignment rejected: " + check.violations.front());
  }

  const int P = inst.num_papers;
  const int R = inst.num_reviewers;
  const int dummy = P;  // row index of the implicit slack paper
  const std::int64_t dummy_demand =
      std::int64_t(R) * inst.reviewer_capacity - std::int64_t(P) * inst.paper_demand;

  PeelState state;
  state.residual.resize(P + 1, R);
  state.residual.topRows(P) = x.probabilities;
  for (int r = 0; r < R; ++r)
    state.residual(dummy, r) =
        std::max(0.0, inst.reviewer_capacity - x.probabilities.col(r).sum());

  const auto entry_cap = [&](int p) -> double {
    return p == dummy ? double(inst.reviewer_capacity) : 1.0;
  };

  const std::int64_t support = (x.probabilities.array() > kSupportTol).count();
  const std::int64_t max_components = support + R + 1;

  AssignmentDistribution dist;
  // `pinned` entries sit at weight * cap and must appear at full value in
  // every remaining component.
  Matrix& residual = state.residual;
  while (state.weight > 1e-12) {
    if (std::int64_t(dist.components.size()) > max_components)
      throw std::logic_error("decomposition exceeded its component bound");

    const double snap_tol = 1e-9 * state.weight;
    Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic> pinned(P + 1, R);
    bool any_free = false;
    for (int p = 0; p <= P; ++p)
      for (int r = 0; r < R; ++r) {
        double& v = residual(p, r);
        const double cap = entry_cap(p);
        if (v <= snap_tol) {
          v = 0.0;
          pinned(p, r) = 0;
        } else if (v >= state.weight * cap - snap_tol) {
          v = state.weight * cap;
          pinned(p, r) = 1;
        } else {
          pinned(p, r) = -1;
          any_free = true;
        }
      }

    IntMatrix point(P + 1, R);
    if (!any_free) {
      // Residual is already integral relative to the remaining weight.
      for (int p = 0; p <= P; ++p) {
        std::int64_t row = 0;
        for (int r = 0; r < R; ++r) {
          point(p, r) = pinned(p, r) == 1 ? std::int64_t(std::llround(entry_cap(p))) : 0;
          row += point(p, r);
        }
        if (row != (p == dummy ? dummy_demand : inst.paper_demand))
          throw std::logic_error("residual degenerated to an infeasible integral point");
      }
    } else {
      FlowNetwork net(P + 1, R);
      for (int p = 0; p <= P; ++p) {
        std::int64_t pinned_load = 0;
        for (int r = 0; r < R; ++r)
          if (pinned(p, r) == 1) pinned_load += std::llround(entry_cap(p));
        net.paper_supply[p] =
            (p == dummy ? dummy_demand : inst.paper_demand) - pinned_load;
        if (net.paper_supply[p] < 0)
          throw std::logic_error("pinned mass exceeds a row demand during peeling");
      }
      for (int r = 0; r < R; ++r) {
        std::int64_t pinned_load = 0;
        for (int p = 0; p <= P; ++p)
          if (pinned(p, r) == 1) pinned_load += std::llround(entry_cap(p));
        net.reviewer_capacity[r] = inst.reviewer_capacity - pinned_load;
        if (net.reviewer_capacity[r] < 0)
          throw std::logic_error("pinned mass exceeds a column capacity during peeling");
      }
      for (int p = 0; p <= P; ++p)
        for (int r = 0; r < R; ++r)
          if (pinned(p, r) == -1)
            net.arcs(p, r).runs.push_back(
                {0, p == dummy ? std::int64_t(inst.reviewer_capacity) : 1});

      std::int64_t wanted = 0;
      for (int p = 0; p <= P; ++p) wanted += net.paper_supply[p];
      const FlowResult flow = max_cost_max_flow(net);
      if (flow.flow_value != wanted)
        throw std::logic_error("no integral point on the residual face; peeling is stuck");
      point = flow.units;
      for (int p = 0; p <= P; ++p)
        for (int r = 0; r < R; ++r)
          if (pinned(p, r) == 1) point(p, r) = std::llround(entry_cap(p));
    }

    // Largest step that keeps the residual inside the shrinking polytope.
    double step = state.weight;
    for (int p = 0; p <= P; ++p)
      for (int r = 0; r < R; ++r) {
        const std::int64_t z = point(p, r);
        const double cap = entry_cap(p);
        if (z > 0) step = std::min(step, residual(p, r) / double(z));
        if (double(z) < cap)
          step = std::min(step,
                          (state.weight * cap - residual(p, r)) / (cap - double(z)));
      }
    if (!(step > 0.0))
      throw std::logic_error("peeling made no progress");

    DeterministicAssignment component;
    component.assignment.resize(P, R);
    for (int p = 0; p < P; ++p)
      for (int r = 0; r < R; ++r) component.assignment(p, r) = int(point(p, r));
    dist.components.push_back(std::move(component));
    dist.weights.push_back(step);

    for (int p = 0; p <= P; ++p)
      for (int r = 0; r < R; ++r) residual(p, r) -= step * double(point(p, r));
    state.weight -= step;
  }

  double total = 0.0;
  for (double w : dist.weights) total += w;
  for (double& w : dist.weights) w /= total;
  return dist;
}

DeterministicAssignment sample_assignment(const AssignmentDistribution& dist,
                                          std::uint64_t seed) {
  if (dist.components.empty())
    throw Error(Errc::invalid_argument, "empty assignment distribution");
  SplitMix64 rng(seed);
  const double u = rng.next_unit();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < dist.components.size(); ++i) {
    cumulative += dist.weights[i];
    if (u < cumulative) return dist.components[i];
  }
  return dist.components.back();
}

}  // namespace randmatch
