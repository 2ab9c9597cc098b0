#include "randmatch/flow.hpp"

#include "test_instances.hpp"

#include <doctest.h>

#include <cmath>

using namespace randmatch;
using randmatch::testing::two_cluster_instance;

namespace {

PerturbationFunction quad(double beta) {
  PerturbationSpec s;
  s.family = PerturbationFamily::quadratic;
  s.beta = beta;
  return make_perturbation(s);
}

PerturbationFunction linear() { return make_perturbation(PerturbationSpec{}); }

}  // namespace

TEST_CASE("pm network carries decreasing per-arc increments of a concave f") {
  const ProblemInstance inst = two_cluster_instance();
  const PerturbationFunction f = quad(0.25);
  const FlowNetwork net = build_pm_network(inst, Rational(1, 2), f, 6);

  // Same-area pair: three unit arcs, costs strictly decreasing, each equal to
  // the fixed-point similarity-weighted increment of f on the 1/6 grid.
  const PairArcs& same = net.arcs(0, 0);
  CHECK(same.total_capacity() == 3);
  REQUIRE(same.runs.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const double increment = f.value((i + 1) / 6.0) - f.value(i / 6.0);
    CHECK(same.runs[i].cost == std::llround(increment * double(kCostScale)));
    CHECK(same.runs[i].count == 1);
    if (i > 0) CHECK(same.runs[i].cost < same.runs[i - 1].cost);
  }

  // Cross-area pair: zero similarity, all arcs merge into one zero-cost run.
  const PairArcs& cross = net.arcs(0, 4);
  REQUIRE(cross.runs.size() == 1);
  CHECK(cross.runs[0].cost == 0);
  CHECK(cross.runs[0].count == 3);

  CHECK(net.paper_supply[0] == 6);
  CHECK(net.reviewer_capacity[0] == 6);
}

TEST_CASE("linear perturbation gives one run of equal costs") {
  const ProblemInstance inst = two_cluster_instance();
  const FlowNetwork net = build_pm_network(inst, Rational(1, 2), linear(), 6);
  const PairArcs& same = net.arcs(1, 1);
  REQUIRE(same.runs.size() == 1);
  CHECK(same.runs[0].count == 3);
  CHECK(same.runs[0].cost == std::llround(double(kCostScale) / 6.0));
}

TEST_CASE("a cap below the grid resolution is rejected") {
  const ProblemInstance inst = two_cluster_instance();
  CHECK_THROWS_AS(build_pm_network(inst, Rational(1, 8), linear(), 4), Error);
}

TEST_CASE("two-cluster flow saturates and spreads within areas") {
  const ProblemInstance inst = two_cluster_instance();
  const FlowNetwork net = build_pm_network(inst, Rational(1, 2), quad(0.25), 6);
  const FlowResult result = max_cost_max_flow(net);
  CHECK(result.flow_value == 30);  // papers * demand * precision
  for (int p = 0; p < 5; ++p)
    for (int r = 0; r < 5; ++r) {
      const bool same = (p < 3) == (r < 3);
      CHECK(result.units(p, r) == (same ? (p < 3 ? 2 : 3) : 0));
    }
}

TEST_CASE("single pair saturates at full cost") {
  ProblemInstance inst;
  inst.num_papers = 1;
  inst.num_reviewers = 1;
  inst.paper_demand = 1;
  inst.reviewer_capacity = 1;
  inst.similarity = Matrix::Ones(1, 1);
  const FlowNetwork net = build_pm_network(inst, Rational(1, 1), linear(), 2);
  const FlowResult result = max_cost_max_flow(net);
  CHECK(result.flow_value == 2);
  CHECK(std::int64_t(result.total_cost) == kCostScale);  // fixpoint(1.0)
}

TEST_CASE("zero similarities keep the flow value and drop the cost") {
  ProblemInstance inst = two_cluster_instance();
  inst.similarity.setZero();
  const FlowNetwork net = build_pm_network(inst, Rational(1, 2), linear(), 6);
  const FlowResult result = max_cost_max_flow(net);
  CHECK(result.flow_value == 30);
  CHECK(std::int64_t(result.total_cost) == 0);
}

TEST_CASE("total cost tracks the perturbed objective within rounding") {
  RandomDiscreteSpec spec;
  spec.levels = {0.25, 0.5, 1.0};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    spec.seed = seed;
    const ProblemInstance inst = generate_random_discrete(8, 6, spec, 2, 4);
    const int w = 5;
    const PerturbationFunction f = quad(0.4);
    const FlowNetwork net = build_pm_network(inst, Rational(3, 5), f, w);
    const FlowResult result = max_cost_max_flow(net);

    double objective = 0.0;
    for (int p = 0; p < inst.num_papers; ++p)
      for (int r = 0; r < inst.num_reviewers; ++r)
        objective += inst.similarity(p, r) * f.value(double(result.units(p, r)) / w);
    const double bound =
        double(inst.num_papers) * inst.num_reviewers * w / double(kCostScale);
    CHECK(std::abs(double(std::int64_t(result.total_cost)) / double(kCostScale) - objective) <=
          bound);
  }
}

TEST_CASE("flow conserves loads and is deterministic") {
  RandomDiscreteSpec spec;
  spec.levels = {0.5, 1.0};
  spec.seed = 11;
  const ProblemInstance inst = generate_random_discrete(7, 5, spec, 2, 4);
  const FlowNetwork net = build_pm_network(inst, Rational(1, 2), quad(0.25), 4);
  const FlowResult a = max_cost_max_flow(net);
  const FlowResult b = max_cost_max_flow(net);
  CHECK(a.units == b.units);
  CHECK(std::int64_t(a.total_cost) == std::int64_t(b.total_cost));

  std::int64_t total = 0;
  for (int p = 0; p < inst.num_papers; ++p) {
    CHECK(a.units.row(p).sum() <= net.paper_supply[p]);
    total += a.units.row(p).sum();
  }
  for (int r = 0; r < inst.num_reviewers; ++r)
    CHECK(a.units.col(r).sum() <= net.reviewer_capacity[r]);
  CHECK(total == a.flow_value);
}

TEST_CASE("zero supply yields a zero flow") {
  FlowNetwork net(2, 2);
  net.reviewer_capacity = {1, 1};
  net.arcs(0, 0).runs.push_back({5, 1});
  const FlowResult result = max_cost_max_flow(net);
  CHECK(result.flow_value == 0);
  CHECK(std::int64_t(result.total_cost) == 0);
}
