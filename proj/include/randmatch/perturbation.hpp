#pragma once

#include "randmatch/types.hpp"

#include <functional>
#include <string>

namespace randmatch {

enum class PerturbationFamily {
  linear,             // f(x) = x
  quadratic,          // f(x) = x - beta * x^2,            beta in [0, 1]
  exponential,        // f(x) = 1 - exp(-alpha * x),       alpha > 0
  entropy_targeted,   // f(x) = x - (lambda / s) * x ln x, per-pair, lambda >= 0
  quadratic_targeted, // f(x) = x - (lambda / s) * x^2,    per-pair, lambda >= 0
  support_targeted,   // f(x) = x + (lambda / s) * [x > 0]; analysis only,
                      // rejected by every solver (discontinuous at 0)
};

struct PerturbationSpec {
  PerturbationFamily family = PerturbationFamily::linear;
  double beta = 0.0;
  double alpha = 1.0;
  double lambda = 0.0;

  /// "linear", "quad:0.25", "exp:2.0", "tq:0.5", "te:0.5".
  static PerturbationSpec parse(const std::string& token);
  std::string to_string() const;
};

/// Immutable evaluator for a perturbation function and its derivative on
/// [0, 1]. Targeted families depend on the pair's similarity `s`; the other
/// families ignore it. Pairs with s = 0 fall back to f(x) = x, since their
/// contribution to the perturbed quality is zero either way.
class PerturbationFunction {
 public:
  explicit PerturbationFunction(const PerturbationSpec& spec);

  double value(double x, double s = 1.0) const;

  /// Derivative. For the entropy-targeted family the derivative diverges at
  /// zero; evaluation clamps x to at least 1e-12.
  double deriv(double x, double s = 1.0) const;

  const PerturbationSpec& spec() const { return spec_; }
  bool per_pair() const;
  bool differentiable() const { return spec_.family != PerturbationFamily::support_targeted; }
  bool strictly_concave() const;

 private:
  PerturbationSpec spec_;
};

PerturbationFunction make_perturbation(const PerturbationSpec& spec);

/// Checks f(0) = 0, monotone nondecreasing and concave second differences on
/// a uniform grid of `grid_size` points. Flags (as a note, not a violation)
/// a derivative that diverges at zero.
ValidationReport verify_perturbation(const std::function<double(double)>& f, int grid_size);
ValidationReport verify_perturbation(const PerturbationFunction& f, int grid_size,
                                     double s = 1.0);

/// Hypothesis for blockwise dominance: f'(0) < dom * f'(1).
bool blockwise_condition_holds(const PerturbationFunction& f, double dominance_factor,
                               double s = 1.0);

}  // namespace randmatch
