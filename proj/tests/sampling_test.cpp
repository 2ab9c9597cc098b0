#include "randmatch/sampling.hpp"

#include "randmatch/solvers.hpp"
#include "test_instances.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace randmatch;
using randmatch::testing::two_cluster_instance;
using randmatch::testing::two_cluster_uniform;

namespace {

Matrix reconstruct(const AssignmentDistribution& dist) {
  Matrix sum = Matrix::Zero(dist.components.front().assignment.rows(),
                            dist.components.front().assignment.cols());
  for (std::size_t i = 0; i < dist.components.size(); ++i)
    sum += dist.weights[i] * dist.components[i].assignment.cast<double>();
  return sum;
}

void check_distribution(const AssignmentDistribution& dist, const FractionalAssignment& x,
                        const ProblemInstance& inst) {
  double total = 0.0;
  for (double w : dist.weights) {
    CHECK(w > 0.0);
    total += w;
  }
  CHECK(std::abs(total - 1.0) <= 1e-9);
  CHECK((reconstruct(dist) - x.probabilities).cwiseAbs().maxCoeff() <= 1e-6);

  const std::int64_t support = (x.probabilities.array() > kSupportTol).count();
  CHECK(std::int64_t(dist.components.size()) <= support + inst.num_reviewers + 1);

  for (const DeterministicAssignment& component : dist.components) {
    for (int p = 0; p < inst.num_papers; ++p)
      CHECK(component.assignment.row(p).sum() == inst.paper_demand);
    for (int r = 0; r < inst.num_reviewers; ++r)
      CHECK(component.assignment.col(r).sum() <= inst.reviewer_capacity);
    for (int p = 0; p < inst.num_papers; ++p)
      for (int r = 0; r < inst.num_reviewers; ++r)
        if (component.assignment(p, r) != 0)
          CHECK(x.probabilities(p, r) > 0.0);  // support containment
  }
}

}  // namespace

TEST_CASE("a binary assignment decomposes into itself") {
  ProblemInstance inst;
  inst.num_papers = 2;
  inst.num_reviewers = 3;
  inst.paper_demand = 1;
  inst.reviewer_capacity = 1;
  inst.similarity = Matrix::Ones(2, 3);
  Matrix x(2, 3);
  x << 1, 0, 0,
       0, 1, 0;
  const AssignmentDistribution dist = decompose(FractionalAssignment{x}, inst);
  REQUIRE(dist.components.size() == 1);
  CHECK(dist.weights[0] == doctest::Approx(1.0));
  CHECK(dist.components[0].assignment.cast<double>() == x);
}

TEST_CASE("a fractional two-cycle splits into its two permutations") {
  ProblemInstance inst;
  inst.num_papers = 2;
  inst.num_reviewers = 2;
  inst.paper_demand = 1;
  inst.reviewer_capacity = 1;
  inst.similarity = Matrix::Ones(2, 2);
  Matrix x(2, 2);
  x << 0.7, 0.3,
       0.3, 0.7;
  const AssignmentDistribution dist = decompose(FractionalAssignment{x}, inst);
  REQUIRE(dist.components.size() == 2);
  std::map<double, double> weight_of_diag;
  for (std::size_t i = 0; i < dist.components.size(); ++i)
    weight_of_diag[dist.components[i].assignment(0, 0)] = dist.weights[i];
  CHECK(weight_of_diag[1] == doctest::Approx(0.7));
  CHECK(weight_of_diag[0] == doctest::Approx(0.3));
  check_distribution(dist, FractionalAssignment{x}, inst);
}

TEST_CASE("the uniform two-cluster assignment decomposes within tolerance") {
  const ProblemInstance inst = two_cluster_instance();
  const FractionalAssignment x{two_cluster_uniform()};
  const AssignmentDistribution dist = decompose(x, inst);
  check_distribution(dist, x, inst);
  // Every component keeps both areas internal.
  for (const DeterministicAssignment& component : dist.components)
    for (int p = 0; p < 5; ++p)
      for (int r = 0; r < 5; ++r)
        if ((p < 3) != (r < 3)) CHECK(component.assignment(p, r) == 0);
}

TEST_CASE("malformed marginals are rejected") {
  const ProblemInstance inst = two_cluster_instance();
  Matrix x = two_cluster_uniform();
  x(0, 0) += 0.25;  // row sum off by far more than the tolerance
  CHECK_THROWS_AS(decompose(FractionalAssignment{x}, inst), Error);
}

TEST_CASE("solver outputs decompose with exact loads") {
  RandomDiscreteSpec spec;
  spec.levels = {0.25, 0.5, 1.0};
  for (std::uint64_t seed = 50; seed < 53; ++seed) {
    spec.seed = seed;
    const ProblemInstance inst = generate_random_discrete(8, 6, spec, 2, 4);
    SolverConfig cfg;
    cfg.cap = Rational(2, 5);
    cfg.perturbation.family = PerturbationFamily::quadratic;
    cfg.perturbation.beta = 0.3;
    for (const FractionalAssignment& x :
         {solve_plra(inst, cfg.cap), solve_pm_exact(inst, cfg)}) {
      const AssignmentDistribution dist = decompose(x, inst);
      check_distribution(dist, x, inst);
    }
  }
}

TEST_CASE("iteratively solved assignments decompose too") {
  // Exercises the peeling on output of the conditional-gradient path, whose
  // entries are not multiples of any grid.
  ProblemInstance inst;
  inst.num_papers = 3;
  inst.num_reviewers = 3;
  inst.paper_demand = 1;
  inst.reviewer_capacity = 1;
  inst.similarity.resize(3, 3);
  inst.similarity << 0.4, 0.0, 0.6,
                     0.8, 0.6, 0.0,
                     0.8, 0.6, 1.0;
  SolverConfig cfg;
  cfg.cap = Rational(1, 1);
  cfg.perturbation.family = PerturbationFamily::exponential;
  cfg.perturbation.alpha = 4.0;
  cfg.tol = 1e-9;
  cfg.max_iters = 20000;
  const FractionalAssignment x = solve_pm_exact(inst, cfg);
  const AssignmentDistribution dist = decompose(x, inst);
  check_distribution(dist, x, inst);
}

TEST_CASE("sampling a single-component lottery returns it for any seed") {
  ProblemInstance inst;
  inst.num_papers = 1;
  inst.num_reviewers = 1;
  inst.paper_demand = 1;
  inst.reviewer_capacity = 1;
  inst.similarity = Matrix::Ones(1, 1);
  const AssignmentDistribution dist =
      decompose(FractionalAssignment{Matrix::Ones(1, 1)}, inst);
  for (std::uint64_t seed : {0ull, 1ull, 99999ull})
    CHECK(sample_assignment(dist, seed).assignment(0, 0) == 1);
}

TEST_CASE("sampling frequencies match the weights") {
  AssignmentDistribution dist;
  DeterministicAssignment a, b;
  a.assignment = BinaryMatrix::Identity(2, 2);
  b.assignment = BinaryMatrix::Zero(2, 2);
  b.assignment(0, 1) = b.assignment(1, 0) = 1;
  dist.components = {a, b};
  dist.weights = {0.7, 0.3};

  int hits = 0;
  const int draws = 100000;
  for (int seed = 0; seed < draws; ++seed)
    if (sample_assignment(dist, std::uint64_t(seed)).assignment(0, 0) == 1) ++hits;
  const double freq = double(hits) / draws;
  const double sigma = std::sqrt(0.7 * 0.3 / draws);
  CHECK(std::abs(freq - 0.7) <= 3.0 * sigma);
}

TEST_CASE("samples of the two-cluster lottery stay inside the areas") {
  const ProblemInstance inst = two_cluster_instance();
  const AssignmentDistribution dist =
      decompose(FractionalAssignment{two_cluster_uniform()}, inst);
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const DeterministicAssignment pick = sample_assignment(dist, seed);
    for (int p = 0; p < 5; ++p) {
      CHECK(pick.assignment.row(p).sum() == 1);
      for (int r = 0; r < 5; ++r)
        if ((p < 3) != (r < 3)) CHECK(pick.assignment(p, r) == 0);
    }
  }
}
