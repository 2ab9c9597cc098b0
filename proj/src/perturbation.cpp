#include "randmatch/perturbation.hpp"

#include <cmath>
#include <limits>

namespace randmatch {

namespace {
constexpr double kDerivClamp = 1e-12;
constexpr double kConcavityTol = 1e-9;
}  // namespace

PerturbationSpec PerturbationSpec::parse(const std::string& token) {
  PerturbationSpec spec;
  const auto colon = token.find(':');
  const std::string name = token.substr(0, colon);
  const bool has_param = colon != std::string::npos;
  double param = 0.0;
  if (has_param) {
    try {
      std::size_t used = 0;
      param = std::stod(token.substr(colon + 1), &used);
      if (used != token.size() - colon - 1) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw Error(Errc::parse_error, "bad perturbation parameter in '" + token + "'");
    }
  }
  if (name == "linear" && !has_param) {
    spec.family = PerturbationFamily::linear;
  } else if (name == "quad" && has_param) {
    spec.family = PerturbationFamily::quadratic;
    spec.beta = param;
  } else if (name == "exp" && has_param) {
    spec.family = PerturbationFamily::exponential;
    spec.alpha = param;
  } else if (name == "te" && has_param) {
    spec.family = PerturbationFamily::entropy_targeted;
    spec.lambda = param;
  } else if (name == "tq" && has_param) {
    spec.family = PerturbationFamily::quadratic_targeted;
    spec.lambda = param;
  } else {
    throw Error(Errc::parse_error,
                "unknown perturbation '" + token +
                    "' (expected linear, quad:B, exp:A, tq:L or te:L)");
  }
  return spec;
}

std::string PerturbationSpec::to_string() const {
  switch (family) {
    case PerturbationFamily::linear: return "linear";
    case PerturbationFamily::quadratic: return "quad:" + std::to_string(beta);
    case PerturbationFamily::exponential: return "exp:" + std::to_string(alpha);
    case PerturbationFamily::entropy_targeted: return "te:" + std::to_string(lambda);
    case PerturbationFamily::quadratic_targeted: return "tq:" + std::to_string(lambda);
    case PerturbationFamily::support_targeted: return "tsupport:" + std::to_string(lambda);
  }
  return "?";
}

PerturbationFunction::PerturbationFunction(const PerturbationSpec& spec) : spec_(spec) {
  switch (spec.family) {
    case PerturbationFamily::linear:
      break;
    case PerturbationFamily::quadratic:
      if (!(spec.beta >= 0.0 && spec.beta <= 1.0))
        throw Error(Errc::invalid_parameter, "quadratic beta must lie in [0, 1]");
      break;
    case PerturbationFamily::exponential:
      if (!(spec.alpha > 0.0) || !std::isfinite(spec.alpha))
        throw Error(Errc::invalid_parameter, "exponential alpha must be positive");
      break;
    case PerturbationFamily::entropy_targeted:
    case PerturbationFamily::quadratic_targeted:
    case PerturbationFamily::support_targeted:
      if (!(spec.lambda >= 0.0) || !std::isfinite(spec.lambda))
        throw Error(Errc::invalid_parameter, "lambda must be nonnegative");
      break;
  }
}

double PerturbationFunction::value(double x, double s) const {
  switch (spec_.family) {
    case PerturbationFamily::linear:
      return x;
    case PerturbationFamily::quadratic:
      return x - spec_.beta * x * x;
    case PerturbationFamily::exponential:
      return 1.0 - std::exp(-spec_.alpha * x);
    case PerturbationFamily::entropy_targeted:
      if (s <= 0.0 || x <= 0.0) return x > 0.0 ? x : 0.0;
      return x - (spec_.lambda / s) * x * std::log(x);
    case PerturbationFamily::quadratic_targeted:
      if (s <= 0.0) return x;
      return x - (spec_.lambda / s) * x * x;
    case PerturbationFamily::support_targeted:
      if (s <= 0.0) return x;
      return x + (x > 0.0 ? spec_.lambda / s : 0.0);
  }
  return x;
}

double PerturbationFunction::deriv(double x, double s) const {
  switch (spec_.family) {
    case PerturbationFamily::linear:
      return 1.0;
    case PerturbationFamily::quadratic:
      return 1.0 - 2.0 * spec_.beta * x;
    case PerturbationFamily::exponential:
      return spec_.alpha * std::exp(-spec_.alpha * x);
    case PerturbationFamily::entropy_targeted: {
      if (s <= 0.0) return 1.0;
      const double xc = x < kDerivClamp ? kDerivClamp : x;
      return 1.0 - (spec_.lambda / s) * (std::log(xc) + 1.0);
    }
    case PerturbationFamily::quadratic_targeted:
      if (s <= 0.0) return 1.0;
      return 1.0 - 2.0 * (spec_.lambda / s) * x;
    case PerturbationFamily::support_targeted:
      throw Error(Errc::not_differentiable,
                  "support-targeted perturbation has no derivative at 0");
  }
  return 1.0;
}

bool PerturbationFunction::per_pair() const {
  switch (spec_.family) {
    case PerturbationFamily::entropy_targeted:
    case PerturbationFamily::quadratic_targeted:
    case PerturbationFamily::support_targeted:
      return true;
    default:
      return false;
  }
}

bool PerturbationFunction::strictly_concave() const {
  switch (spec_.family) {
    case PerturbationFamily::linear:
      return false;
    case PerturbationFamily::quadratic:
      return spec_.beta > 0.0;
    case PerturbationFamily::exponential:
      return true;
    case PerturbationFamily::entropy_targeted:
    case PerturbationFamily::quadratic_targeted:
      return spec_.lambda > 0.0;
    case PerturbationFamily::support_targeted:
      return false;
  }
  return false;
}

PerturbationFunction make_perturbation(const PerturbationSpec& spec) {
  return PerturbationFunction(spec);
}

ValidationReport verify_perturbation(const std::function<double(double)>& f, int grid_size) {
  ValidationReport report;
  if (grid_size < 3) {
    report.violations.push_back("grid_size must be at least 3");
    return report;
  }
  if (std::abs(f(0.0)) > 0.0) report.violations.push_back("f(0) != 0");

  std::vector<double> values(grid_size);
  const double h = 1.0 / (grid_size - 1);
  for (int i = 0; i < grid_size; ++i) values[i] = f(i * h);

  bool monotone = true, concave = true;
  for (int i = 0; i + 1 < grid_size; ++i)
    if (values[i + 1] < values[i] - kConcavityTol) monotone = false;
  for (int i = 1; i + 1 < grid_size; ++i)
    if (values[i + 1] - 2.0 * values[i] + values[i - 1] > kConcavityTol) concave = false;
  if (!monotone) report.violations.push_back("not nondecreasing on [0, 1]");
  if (!concave) report.violations.push_back("not concave on [0, 1]");

  // Secant slopes from 0 that keep growing as the probe shrinks mark a
  // derivative that diverges at zero (the entropy-targeted family does this).
  const double s1 = (f(1e-4) - values[0]) / 1e-4;
  const double s2 = (f(1e-8) - values[0]) / 1e-8;
  const double s3 = (f(1e-12) - values[0]) / 1e-12;
  if (s3 > s2 + 1e-6 && s2 > s1 + 1e-6)
    report.notes.push_back("derivative unbounded at 0");
  return report;
}

ValidationReport verify_perturbation(const PerturbationFunction& f, int grid_size, double s) {
  return verify_perturbation([&](double x) { return f.value(x, s); }, grid_size);
}

bool blockwise_condition_holds(const PerturbationFunction& f, double dominance_factor,
                               double s) {
  const double d0 = f.deriv(0.0, s);
  const double d1 = f.deriv(1.0, s);
  if (std::isinf(dominance_factor)) return d1 > 0.0 && std::isfinite(d0);
  return d0 < dominance_factor * d1;
}

}  // namespace randmatch
