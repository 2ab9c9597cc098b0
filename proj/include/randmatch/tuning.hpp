#pragma once

#include "randmatch/instance.hpp"
#include "randmatch/solvers.hpp"
#include "randmatch/types.hpp"

#include <optional>

namespace randmatch {

struct TuningConfig {
  std::optional<double> quality_floor;  // absolute floor
  std::optional<double> eta;            // floor as a fraction of max_quality
  double delta = 0.0;                   // cap slack added on top of the PLRA cap
  double search_tol = 1e-3;             // cap and beta grid resolution
  double alpha_max = 64.0;              // upper end of the alpha search range
  int alpha_steps = 40;                 // bisection steps for alpha
  double solver_tol = 1e-8;
  int solver_max_iters = 2000;
};

/// Resolves the configured floor to an absolute quality, evaluating eta
/// against max_quality when given as a fraction.
double resolve_floor(const ProblemInstance& inst, const TuningConfig& cfg);

/// Smallest cap on the grid (resolution search_tol, snapped to rationals)
/// whose quality-maximal assignment reaches the floor. Quality is monotone in
/// the cap, so a bisection suffices.
Rational find_q_plra(const ProblemInstance& inst, double quality_floor,
                     double search_tol = 1e-3);

struct QuadraticTuning {
  Rational cap;      // min(q_plra + delta, 1)
  double beta = 0;   // largest grid value keeping the floor
  double quality = 0;
  Rational q_plra;
};

struct ExponentialTuning {
  Rational cap;
  double alpha = 0;
  double quality = 0;
  Rational q_plra;
};

/// Floor-constrained parameter search for the quadratic perturbation. The
/// quality of the optimum is nonincreasing in beta, which makes the bisection
/// sound; the result is re-verified by an independent solve.
QuadraticTuning tune_pm_quadratic(const ProblemInstance& inst, const TuningConfig& cfg);

/// Same search for the exponential perturbation. Quality is not guaranteed to
/// be monotone in alpha; a bracket whose low end misses the floor while the
/// high end reaches it is reported as Errc::non_monotone with the evidence,
/// and the returned alpha is always re-validated against the floor.
ExponentialTuning tune_pm_exponential(const ProblemInstance& inst, const TuningConfig& cfg);

}  // namespace randmatch
