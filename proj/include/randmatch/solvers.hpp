#pragma once

#include "randmatch/instance.hpp"
#include "randmatch/metrics.hpp"
#include "randmatch/perturbation.hpp"
#include "randmatch/types.hpp"

#include <optional>
#include <string>

namespace randmatch {

struct SolverConfig {
  Rational cap{1, 1};           // entrywise probability cap
  PerturbationSpec perturbation{};
  int precision = 10;           // grid fineness of the flow approximation
  double tol = 1e-8;            // duality-gap stop, relative to sum of S
  int max_iters = 2000;
};

struct SolverDiagnostics {
  std::string method;
  int iterations = 0;
  double fw_gap = 0.0;          // last Frank-Wolfe gap (absolute)
  long long augmentations = 0;
  double wall_seconds = 0.0;
};

/// Quality-maximal assignment under the entrywise cap, solved exactly on the
/// network scaled by the cap's denominator. Returns a vertex of the polytope.
FractionalAssignment solve_plra(const ProblemInstance& inst, const Rational& cap,
                                SolverDiagnostics* diag = nullptr);

/// Piecewise-linear flow approximation of the perturbed objective at the
/// configured precision, followed by a lexicographic top-up of any residual
/// paper demand. Perturbed quality is within f(1/w) * sum(S) of the optimum.
FractionalAssignment solve_pm_flow(const ProblemInstance& inst, const SolverConfig& cfg,
                                   SolverDiagnostics* diag = nullptr);

/// Maximizes the perturbed quality over the capped assignment polytope.
/// Separable rows are solved in closed form when every reviewer column stays
/// slack; otherwise conditional-gradient iterations with away steps and
/// golden-section line search run until the duality gap drops below
/// tol * sum(S). The reported gap bounds the distance to the optimum.
FractionalAssignment solve_pm_exact(const ProblemInstance& inst, const SolverConfig& cfg,
                                    SolverDiagnostics* diag = nullptr);

/// Best achievable quality with the cap removed (cap = 1).
double max_quality(const ProblemInstance& inst);

/// Per-paper greedy: the cap to each of the top floor(demand/cap) reviewers
/// by similarity (ties by reviewer index), the remainder to the next one.
/// Ignores reviewer capacities; returns nullopt when a column overflows.
std::optional<FractionalAssignment> solve_greedy(const ProblemInstance& inst,
                                                 const Rational& cap);

/// Greedy that treats reviewers of equal similarity as one group: saturates
/// groups at the cap while the remaining demand allows, then splits the rest
/// uniformly inside the boundary group. Same overflow semantics as greedy.
std::optional<FractionalAssignment> solve_balanced_greedy(const ProblemInstance& inst,
                                                          const Rational& cap);

/// Maximizes sum(C .* y) over the capped assignment polytope; exact vertex
/// via the flow path. C may have negative entries.
FractionalAssignment maximize_linear_objective(const ProblemInstance& inst, const Matrix& c,
                                               const Rational& cap,
                                               SolverDiagnostics* diag = nullptr);

}  // namespace randmatch
