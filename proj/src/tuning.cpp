#include "randmatch/tuning.hpp"

#include "randmatch/metrics.hpp"

#include <cmath>
#include <string>

namespace randmatch {

namespace {

// Floor comparisons tolerate solver noise of this relative size.
double floor_slack(double floor) { return 1e-9 * std::max(1.0, std::abs(floor)); }

std::int64_t grid_denominator(double search_tol) {
  if (!(search_tol > 0))
    throw Error(Errc::invalid_parameter, "search_tol must be positive");
  const std::int64_t den = std::llround(1.0 / search_tol);
  return std::max<std::int64_t>(den, 1);
}

double plra_quality(const ProblemInstance& inst, const Rational& cap) {
  const FractionalAssignment x = solve_plra(inst, cap);
  return (x.probabilities.array() * inst.similarity.array()).sum();
}

double pm_quality(const ProblemInstance& inst, const Rational& cap,
                  const PerturbationSpec& f, const TuningConfig& cfg) {
  SolverConfig sc;
  sc.cap = cap;
  sc.perturbation = f;
  sc.tol = cfg.solver_tol;
  sc.max_iters = cfg.solver_max_iters;
  const FractionalAssignment x = solve_pm_exact(inst, sc);
  return (x.probabilities.array() * inst.similarity.array()).sum();
}

}  // namespace

double resolve_floor(const ProblemInstance& inst, const TuningConfig& cfg) {
  if (cfg.quality_floor && cfg.eta)
    throw Error(Errc::invalid_argument, "give either an absolute floor or eta, not both");
  if (cfg.quality_floor) return *cfg.quality_floor;
  if (cfg.eta) {
    if (*cfg.eta < 0.0 || *cfg.eta > 1.0)
      throw Error(Errc::floor_unachievable, "eta must lie in [0, 1]");
    return *cfg.eta * max_quality(inst);
  }
  throw Error(Errc::invalid_argument, "no quality floor configured");
}

Rational find_q_plra(const ProblemInstance& inst, double quality_floor, double search_tol) {
  const double best = max_quality(inst);
  if (quality_floor > best + floor_slack(quality_floor))
    throw Error(Errc::floor_unachievable,
                "floor " + std::to_string(quality_floor) + " exceeds maximum quality " +
                    std::to_string(best));

  const std::int64_t den = grid_denominator(search_tol);

  // Feasibility is monotone in the cap; find the smallest feasible grid point.
  std::int64_t lo = 1, hi = den;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (check_feasibility(inst, Rational(mid, den)))
      hi = mid;
    else
      lo = mid + 1;
  }
  const std::int64_t smallest_feasible = lo;
  if (!check_feasibility(inst, Rational(smallest_feasible, den)))
    throw Error(Errc::infeasible, "instance is infeasible even at cap 1");

  const auto reaches_floor = [&](std::int64_t k) {
    return plra_quality(inst, Rational(k, den)) >= quality_floor - floor_slack(quality_floor);
  };

  // Quality is nondecreasing in the cap; bisect for the smallest passing k.
  lo = smallest_feasible;
  hi = den;
  if (reaches_floor(lo)) return Rational(lo, den);
  while (lo + 1 < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (reaches_floor(mid))
      hi = mid;
    else
      lo = mid;
  }
  return Rational(hi, den);
}

namespace {

// Slack is snapped to the search grid so the widened cap stays rational.
Rational widened_cap(const Rational& q_plra, double delta, double search_tol) {
  const std::int64_t den = grid_denominator(search_tol);
  const Rational slack(std::llround(delta * double(den)), den);
  return min(q_plra + slack, Rational(1, 1));
}

}  // namespace

QuadraticTuning tune_pm_quadratic(const ProblemInstance& inst, const TuningConfig& cfg) {
  const double floor = resolve_floor(inst, cfg);
  QuadraticTuning result;
  result.q_plra = find_q_plra(inst, floor, cfg.search_tol);
  result.cap = widened_cap(result.q_plra, cfg.delta, cfg.search_tol);

  const std::int64_t den = grid_denominator(cfg.search_tol);
  const auto quality_at = [&](std::int64_t j) {
    PerturbationSpec f;
    f.family = PerturbationFamily::quadratic;
    f.beta = double(j) / double(den);
    return pm_quality(inst, result.cap, f, cfg);
  };
  const auto passes = [&](std::int64_t j) {
    return quality_at(j) >= floor - floor_slack(floor);
  };

  // beta = 0 is plain quality maximization at a cap at least q_plra, so the
  // low end always passes; search for the largest passing grid point.
  std::int64_t lo = 0, hi = den;
  if (passes(hi)) {
    lo = hi;
  } else {
    while (lo + 1 < hi) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (passes(mid))
        lo = mid;
      else
        hi = mid;
    }
  }
  result.beta = double(lo) / double(den);

  PerturbationSpec f;
  f.family = PerturbationFamily::quadratic;
  f.beta = result.beta;
  result.quality = pm_quality(inst, result.cap, f, cfg);
  if (result.quality < floor - floor_slack(floor))
    throw Error(Errc::floor_unachievable,
                "re-solve at the tuned parameters missed the floor");
  return result;
}

ExponentialTuning tune_pm_exponential(const ProblemInstance& inst, const TuningConfig& cfg) {
  const double floor = resolve_floor(inst, cfg);
  ExponentialTuning result;
  result.q_plra = find_q_plra(inst, floor, cfg.search_tol);
  result.cap = widened_cap(result.q_plra, cfg.delta, cfg.search_tol);

  const auto quality_at = [&](double alpha) {
    PerturbationSpec f;
    f.family = PerturbationFamily::exponential;
    f.alpha = alpha;
    return pm_quality(inst, result.cap, f, cfg);
  };
  const auto passes = [&](double q) { return q >= floor - floor_slack(floor); };

  const double alpha_lo = 1e-6;
  const double q_lo = quality_at(alpha_lo);
  const double q_hi = quality_at(cfg.alpha_max);
  if (!passes(q_lo) && passes(q_hi))
    // The bracket runs the wrong way: small alpha behaves like plain quality
    // maximization and should reach the floor whenever the top does.
    throw Error(Errc::non_monotone,
                "inverted bracket: quality(" + std::to_string(alpha_lo) + ") = " +
                    std::to_string(q_lo) + " < floor " + std::to_string(floor) +
                    " <= quality(" + std::to_string(cfg.alpha_max) + ") = " +
                    std::to_string(q_hi));
  if (passes(q_hi)) {
    // Top of the range already keeps the floor, so it is the largest
    // admissible value.
    result.alpha = cfg.alpha_max;
    result.quality = q_hi;
    return result;
  }
  if (!passes(q_lo))
    throw Error(Errc::floor_unachievable,
                "quality misses the floor across the whole alpha range (floor " +
                    std::to_string(floor) + ", quality(" + std::to_string(alpha_lo) + ") = " +
                    std::to_string(q_lo) + ", quality(" + std::to_string(cfg.alpha_max) +
                    ") = " + std::to_string(q_hi) + ")");

  double lo = alpha_lo, hi = cfg.alpha_max;
  for (int i = 0; i < cfg.alpha_steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (passes(quality_at(mid)))
      lo = mid;
    else
      hi = mid;
  }

  result.alpha = lo;
  result.quality = quality_at(lo);
  if (!passes(result.quality))
    throw Error(Errc::non_monotone,
                "bisection bracket inverted: quality(" + std::to_string(lo) + ") = " +
                    std::to_string(result.quality) + " fell below floor " +
                    std::to_string(floor) + " on re-solve");
  return result;
}

}  // namespace randmatch
