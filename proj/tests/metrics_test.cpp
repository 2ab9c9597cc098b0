#include "randmatch/metrics.hpp"

#include "test_instances.hpp"

#include <doctest.h>

#include <cmath>

using namespace randmatch;
using randmatch::testing::two_cluster_instance;
using randmatch::testing::two_cluster_uniform;

TEST_CASE("metrics of the uniform two-cluster assignment") {
  const ProblemInstance inst = two_cluster_instance();
  const FractionalAssignment x{two_cluster_uniform()};
  CHECK(validate_assignment(x, inst).ok());
  const MetricsReport m = compute_metrics(x, inst);
  CHECK(m.quality == doctest::Approx(5.0));
  CHECK(m.maxprob == doctest::Approx(0.5));
  CHECK(m.avgmaxp == doctest::Approx(0.4));
  CHECK(m.support == 13);
  CHECK(m.entropy == doctest::Approx(3.0 * std::log(3.0) + 2.0 * std::log(2.0)));
  CHECK(m.l2norm == doctest::Approx(std::sqrt(2.0)));
  CHECK_FALSE(m.perturbed_quality.has_value());
}

TEST_CASE("metrics of a half-and-half vertex assignment") {
  const ProblemInstance inst = two_cluster_instance();
  Matrix v = Matrix::Zero(5, 5);
  v(0, 1) = v(0, 2) = 0.5;
  v(1, 0) = v(1, 2) = 0.5;
  v(2, 0) = v(2, 1) = 0.5;
  v(3, 3) = v(3, 4) = 0.5;
  v(4, 3) = v(4, 4) = 0.5;
  const MetricsReport m = compute_metrics(FractionalAssignment{v}, inst);
  CHECK(m.quality == doctest::Approx(5.0));
  CHECK(m.maxprob == doctest::Approx(0.5));
  CHECK(m.avgmaxp == doctest::Approx(0.5));
  CHECK(m.support == 10);
  CHECK(m.entropy == doctest::Approx(5.0 * std::log(2.0)));
  CHECK(m.l2norm == doctest::Approx(std::sqrt(2.5)));
}

TEST_CASE("deterministic assignment extremes") {
  ProblemInstance inst;
  inst.num_papers = 3;
  inst.num_reviewers = 3;
  inst.paper_demand = 1;
  inst.reviewer_capacity = 1;
  inst.similarity = Matrix::Identity(3, 3);
  const FractionalAssignment x{Matrix::Identity(3, 3)};
  const MetricsReport m = compute_metrics(x, inst);
  CHECK(m.quality == doctest::Approx(3.0));
  CHECK(m.maxprob == doctest::Approx(1.0));
  CHECK(m.support == 3);
  CHECK(m.entropy == doctest::Approx(0.0));
  CHECK(m.l2norm == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("dimension mismatch throws") {
  const ProblemInstance inst = two_cluster_instance();
  CHECK_THROWS_AS(compute_metrics(FractionalAssignment{Matrix::Zero(4, 5)}, inst), Error);
}

TEST_CASE("perturbed quality appears when a perturbation is given") {
  const ProblemInstance inst = two_cluster_instance();
  PerturbationSpec spec;
  spec.family = PerturbationFamily::quadratic;
  spec.beta = 0.25;
  const PerturbationFunction f = make_perturbation(spec);
  const MetricsReport m = compute_metrics(FractionalAssignment{two_cluster_uniform()}, inst, &f);
  REQUIRE(m.perturbed_quality.has_value());
  // 9 entries of f(1/3) and 4 of f(1/2), similarity 1 on all of them.
  CHECK(*m.perturbed_quality ==
        doctest::Approx(9.0 * (1.0 / 3 - 0.25 / 9) + 4.0 * (0.5 - 0.25 * 0.25)));
}

TEST_CASE("uniform rows maximize entropy and minimize concentration") {
  // Among rows with a fixed sum, the uniform row has the extreme value of
  // every randomness metric.
  const int nr = 6;
  ProblemInstance inst;
  inst.num_papers = 1;
  inst.num_reviewers = nr;
  inst.paper_demand = 1;
  inst.reviewer_capacity = 1;
  inst.similarity = Matrix::Ones(1, nr);
  Matrix uniform = Matrix::Constant(1, nr, 1.0 / nr);
  const MetricsReport base = compute_metrics(FractionalAssignment{uniform}, inst);

  SplitMix64 rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix row(1, nr);
    double sum = 0.0;
    for (int r = 0; r < nr; ++r) {
      row(0, r) = rng.next_unit() + 1e-3;
      sum += row(0, r);
    }
    row /= sum;
    const MetricsReport m = compute_metrics(FractionalAssignment{row}, inst);
    CHECK(m.entropy <= base.entropy + 1e-12);
    CHECK(m.l2norm >= base.l2norm - 1e-12);
    CHECK(m.maxprob >= base.maxprob - 1e-12);
    CHECK(m.avgmaxp >= base.avgmaxp - 1e-12);
    CHECK(m.support <= base.support);
  }
}

TEST_CASE("metrics are reviewer-permutation equivariant") {
  ProblemInstance inst = two_cluster_instance();
  const Matrix x = two_cluster_uniform();
  const MetricsReport before = compute_metrics(FractionalAssignment{x}, inst);

  const int perm[5] = {3, 0, 4, 2, 1};
  ProblemInstance permuted = inst;
  Matrix xp(5, 5);
  for (int r = 0; r < 5; ++r) {
    permuted.similarity.col(perm[r]) = inst.similarity.col(r);
    xp.col(perm[r]) = x.col(r);
  }
  const MetricsReport after = compute_metrics(FractionalAssignment{xp}, permuted);
  CHECK(after.quality == doctest::Approx(before.quality));
  CHECK(after.maxprob == doctest::Approx(before.maxprob));
  CHECK(after.avgmaxp == doctest::Approx(before.avgmaxp));
  CHECK(after.support == before.support);
  CHECK(after.entropy == doctest::Approx(before.entropy));
  CHECK(after.l2norm == doctest::Approx(before.l2norm));
}

TEST_CASE("binary assignments have zero entropy and counting support") {
  ProblemInstance inst;
  inst.num_papers = 2;
  inst.num_reviewers = 3;
  inst.paper_demand = 2;
  inst.reviewer_capacity = 2;
  inst.similarity = Matrix::Ones(2, 3);
  Matrix x(2, 3);
  x << 1, 1, 0,
       0, 1, 1;
  const MetricsReport m = compute_metrics(FractionalAssignment{x}, inst);
  CHECK(m.entropy == 0.0);
  CHECK(double(m.support) == doctest::Approx(x.sum()));
}
