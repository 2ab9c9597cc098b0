#pragma once

#include "randmatch/instance.hpp"
#include "randmatch/perturbation.hpp"
#include "randmatch/types.hpp"

#include <optional>

namespace randmatch {

/// Marginal assignment probabilities, papers x reviewers. Row sums must equal
/// the paper demand within 1e-9; column sums stay at most the reviewer
/// capacity plus 1e-9.
struct FractionalAssignment {
  Matrix probabilities;
};

/// An entry counts toward the support when it exceeds this threshold. Flow
/// solutions are exact multiples of 1/w, so the threshold only matters for
/// iteratively solved assignments.
inline constexpr double kSupportTol = 1e-9;

struct MetricsReport {
  double quality = 0.0;
  double maxprob = 0.0;
  double avgmaxp = 0.0;
  std::int64_t support = 0;
  double entropy = 0.0;  // natural log
  double l2norm = 0.0;
  std::optional<double> perturbed_quality;
  double support_tol = kSupportTol;
};

ValidationReport validate_assignment(const FractionalAssignment& x, const ProblemInstance& inst);

/// quality = sum x*S, maxprob, average per-paper max, support (entries above
/// support_tol), entropy -sum x ln x with 0 ln 0 = 0, l2 norm, and the
/// perturbed quality sum S*f(x) when a perturbation is supplied.
MetricsReport compute_metrics(const FractionalAssignment& x, const ProblemInstance& inst,
                              const PerturbationFunction* f = nullptr);

}  // namespace randmatch
