#include "randmatch/tuning.hpp"

#include "randmatch/metrics.hpp"
#include "test_instances.hpp"

#include <doctest.h>

#include <cmath>

using namespace randmatch;
using randmatch::testing::nonmonotone_3x3;
using randmatch::testing::two_cluster_instance;

namespace {

double plra_quality(const ProblemInstance& inst, const Rational& cap) {
  const FractionalAssignment x = solve_plra(inst, cap);
  return (x.probabilities.array() * inst.similarity.array()).sum();
}

double pm_quality(const ProblemInstance& inst, const Rational& cap,
                  const PerturbationSpec& f) {
  SolverConfig cfg;
  cfg.cap = cap;
  cfg.perturbation = f;
  const FractionalAssignment x = solve_pm_exact(inst, cfg);
  return (x.probabilities.array() * inst.similarity.array()).sum();
}

}  // namespace

TEST_CASE("smallest cap reaching full quality on the two-cluster instance") {
  const ProblemInstance inst = two_cluster_instance();
  CHECK(find_q_plra(inst, 5.0) == Rational(1, 2));
}

TEST_CASE("floor zero returns the smallest feasible grid cap") {
  const ProblemInstance inst = two_cluster_instance();
  // demand 1 over 5 reviewers: 1/5 is the first feasible grid point.
  CHECK(find_q_plra(inst, 0.0) == Rational(1, 5));
}

TEST_CASE("identity similarities need the full cap for full quality") {
  ProblemInstance inst;
  inst.num_papers = 3;
  inst.num_reviewers = 3;
  inst.paper_demand = 1;
  inst.reviewer_capacity = 1;
  inst.similarity = Matrix::Identity(3, 3);
  CHECK(find_q_plra(inst, 3.0) == Rational(1, 1));
  CHECK_THROWS_AS(find_q_plra(inst, 3.1), Error);
}

TEST_CASE("cap search satisfies its two-sided bracket") {
  RandomDiscreteSpec spec;
  spec.levels = {0.25, 0.5, 1.0};
  spec.seed = 15;
  const ProblemInstance inst = generate_random_discrete(8, 6, spec, 2, 4);
  const double floor = 0.9 * max_quality(inst);
  const Rational cap = find_q_plra(inst, floor);
  CHECK(plra_quality(inst, cap) >= floor - 1e-9);
  const Rational below(cap.num * 1000 / cap.den - 1, 1000);
  if (Rational(2, 6) <= below)  // stay above the smallest feasible grid point
    CHECK(plra_quality(inst, below) < floor);
}

TEST_CASE("quadratic tuning on the two-cluster instance tops out") {
  const ProblemInstance inst = two_cluster_instance();
  TuningConfig cfg;
  cfg.quality_floor = 5.0;
  const QuadraticTuning t = tune_pm_quadratic(inst, cfg);
  CHECK(t.cap == Rational(1, 2));
  CHECK(t.q_plra == Rational(1, 2));
  // The uniform optimum keeps full quality for every admissible strength.
  CHECK(t.beta == doctest::Approx(1.0));
  CHECK(t.quality == doctest::Approx(5.0));
}

TEST_CASE("a floor of zero never binds the quadratic search") {
  const ProblemInstance inst = two_cluster_instance();
  TuningConfig cfg;
  cfg.quality_floor = 0.0;
  const QuadraticTuning t = tune_pm_quadratic(inst, cfg);
  CHECK(t.beta == doctest::Approx(1.0));
}

TEST_CASE("quadratic tuning verifies on random instances") {
  RandomDiscreteSpec spec;
  spec.levels = {0.25, 0.5, 1.0};
  for (std::uint64_t seed = 60; seed < 63; ++seed) {
    spec.seed = seed;
    const ProblemInstance inst = generate_random_discrete(8, 6, spec, 2, 4);
    TuningConfig cfg;
    cfg.eta = 0.95;
    cfg.delta = 0.02;
    const QuadraticTuning t = tune_pm_quadratic(inst, cfg);
    const double floor = 0.95 * max_quality(inst);
    CHECK(t.quality >= floor - 1e-9 * std::max(1.0, floor));

    PerturbationSpec f;
    f.family = PerturbationFamily::quadratic;
    f.beta = t.beta;
    CHECK(pm_quality(inst, t.cap, f) >= floor - 1e-9 * std::max(1.0, floor));
    if (t.beta < 1.0 - 1e-12) {
      f.beta = t.beta + 1e-3;
      CHECK(pm_quality(inst, t.cap, f) < floor - 1e-9 * std::max(1.0, floor));
    }
  }
}

TEST_CASE("exponential tuning on the two-cluster instance reaches the range top") {
  const ProblemInstance inst = two_cluster_instance();
  TuningConfig cfg;
  cfg.quality_floor = 5.0;
  const ExponentialTuning t = tune_pm_exponential(inst, cfg);
  CHECK(t.cap == Rational(1, 2));
  CHECK(t.alpha == doctest::Approx(64.0));
  CHECK(t.quality == doctest::Approx(5.0));

  cfg.quality_floor = 0.0;
  CHECK(tune_pm_exponential(inst, cfg).alpha == doctest::Approx(64.0));
}

TEST_CASE("exponential tuning either verifies or reports non-monotonicity") {
  const ProblemInstance inst = nonmonotone_3x3();
  TuningConfig cfg;
  cfg.eta = 0.999;
  cfg.delta = 0.0;
  try {
    const ExponentialTuning t = tune_pm_exponential(inst, cfg);
    CHECK(t.quality >= 0.999 * max_quality(inst) - 1e-6);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::non_monotone);
  }
}

TEST_CASE("quality is nonincreasing across the beta grid") {
  RandomDiscreteSpec spec;
  spec.levels = {0.25, 0.5, 1.0};
  spec.seed = 70;
  const ProblemInstance inst = generate_random_discrete(7, 6, spec, 2, 4);
  double previous = 1e300;
  for (double beta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    PerturbationSpec f;
    f.family = PerturbationFamily::quadratic;
    f.beta = beta;
    const double q = pm_quality(inst, Rational(1, 2), f);
    CHECK(q <= previous + 1e-7);
    previous = q;
  }
}

TEST_CASE("floor configuration is validated") {
  const ProblemInstance inst = two_cluster_instance();
  TuningConfig cfg;
  CHECK_THROWS_AS(resolve_floor(inst, cfg), Error);
  cfg.quality_floor = 1.0;
  cfg.eta = 0.5;
  CHECK_THROWS_AS(resolve_floor(inst, cfg), Error);
  cfg.quality_floor.reset();
  cfg.eta = 1.5;
  CHECK_THROWS_AS(resolve_floor(inst, cfg), Error);
  cfg.eta = 0.8;
  CHECK(resolve_floor(inst, cfg) == doctest::Approx(4.0));
}
