#pragma once

#include "randmatch/instance.hpp"

namespace randmatch::testing {

/// Two subject areas, papers (3, 2), reviewers (3, 2), similarity 1 inside an
/// area and 0 across, one-to-one loads. The quality-optimal randomized
/// assignment spreads uniformly within each area (1/3 and 1/2).
inline ProblemInstance two_cluster_instance() {
  BlockwiseSpec spec;
  spec.block_identity.resize(2, 2);
  spec.block_identity << 1, 0, 0, 1;
  spec.paper_sizes = {3, 2};
  spec.reviewer_sizes = {3, 2};
  return generate_blockwise(spec, 1, 1);
}

/// Uniform-within-area assignment for the two-cluster instance.
inline Matrix two_cluster_uniform() {
  Matrix x = Matrix::Zero(5, 5);
  x.block(0, 0, 3, 3).setConstant(1.0 / 3.0);
  x.block(3, 3, 2, 2).setConstant(0.5);
  return x;
}

/// 3x3 instance whose exponential-perturbation quality curve is known to be
/// non-monotone in alpha at cap 1.
inline ProblemInstance nonmonotone_3x3() {
  ProblemInstance inst;
  inst.num_papers = 3;
  inst.num_reviewers = 3;
  inst.paper_demand = 1;
  inst.reviewer_capacity = 1;
  inst.similarity.resize(3, 3);
  inst.similarity << 0.4, 0.0, 0.6,
                     0.8, 0.6, 0.0,
                     0.8, 0.6, 1.0;
  return inst;
}

}  // namespace randmatch::testing
