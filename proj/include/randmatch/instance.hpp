#pragma once

#include "randmatch/types.hpp"

namespace randmatch {

/// A matching problem: papers with a fixed reviewer demand, reviewers with a
/// load cap, and a nonnegative similarity matrix (papers x reviewers).
struct ProblemInstance {
  int num_papers = 0;
  int num_reviewers = 0;
  int paper_demand = 1;       // reviewers required per paper
  int reviewer_capacity = 1;  // max papers per reviewer
  Matrix similarity;          // num_papers x num_reviewers, entries >= 0
};

/// Block-structured similarity: k subject areas, similarity depends only on
/// the (paper area, reviewer area) pair, and each area's own reviewers beat
/// every other area strictly.
struct BlockwiseSpec {
  Matrix block_identity;          // k x k, diagonal strictly dominant row-wise
  std::vector<int> paper_sizes;   // papers per area
  std::vector<int> reviewer_sizes;
};

/// I.i.d. similarities drawn uniformly from a finite set of positive levels.
struct RandomDiscreteSpec {
  std::vector<double> levels;  // strictly increasing, all > 0
  std::uint64_t seed = 0;
};

ValidationReport validate_instance(const ProblemInstance& inst);

/// min over rows i of min over j != i of A[i,i] / A[i,j]; +inf when every
/// off-diagonal entry of some row is zero and that minimum is vacuous.
double dominance_factor(const Matrix& block_identity);

ValidationReport validate_blockwise_spec(const BlockwiseSpec& spec);

ProblemInstance generate_blockwise(const BlockwiseSpec& spec, int paper_demand,
                                   int reviewer_capacity);

ProblemInstance generate_random_discrete(int num_papers, int num_reviewers,
                                         const RandomDiscreteSpec& spec,
                                         int paper_demand = 1, int reviewer_capacity = 1);

/// True iff some fractional assignment exists with row sums equal to the
/// paper demand, column sums at most the reviewer capacity, and every entry
/// in [0, cap]. Decided by a max-flow value test on the network scaled by
/// cap's denominator.
bool check_feasibility(const ProblemInstance& inst, const Rational& cap);

}  // namespace randmatch
