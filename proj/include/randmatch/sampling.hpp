#pragma once

#include "randmatch/instance.hpp"
#include "randmatch/metrics.hpp"
#include "randmatch/types.hpp"

namespace randmatch {

/// One concrete assignment: every paper gets exactly its demand in reviewers,
/// no reviewer exceeds its capacity. Entries may exceed any probability cap
/// that shaped the marginals; the cap constrains marginals only.
struct DeterministicAssignment {
  BinaryMatrix assignment;  // papers x reviewers, entries in {0, 1}
};

/// A lottery over deterministic assignments realizing given marginals:
/// weights are positive, sum to 1, and the weighted component sum equals the
/// fractional assignment entrywise.
struct AssignmentDistribution {
  std::vector<DeterministicAssignment> components;
  std::vector<double> weights;
};

/// Expresses the fractional assignment as a convex combination of feasible
/// deterministic assignments by iterative peeling: each round extracts an
/// integral point of the residual face found by a max-flow over the residual
/// support (reviewer slack absorbed by an implicit dummy paper so every
/// column is an equality). At most support(x) + num_reviewers + 1 components.
AssignmentDistribution decompose(const FractionalAssignment& x, const ProblemInstance& inst);

/// Draws one component with probability proportional to its weight.
/// Deterministic for a fixed seed.
DeterministicAssignment sample_assignment(const AssignmentDistribution& dist,
                                          std::uint64_t seed);

}  // namespace randmatch
