#include "randmatch/solvers.hpp"

#include "randmatch/flow.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

namespace randmatch {

namespace {

constexpr std::int64_t kMaxCapDenominator = 1000000;
constexpr double kGradientScale = 1e12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_representable_cap(const Rational& cap) {
  if (cap.num <= 0 || Rational(1, 1) < cap)
    throw Error(Errc::invalid_cap, "cap must lie in (0, 1]");
  if (cap.den > kMaxCapDenominator)
    throw Error(Errc::irrational_cap,
                "cap denominator " + std::to_string(cap.den) + " exceeds 10^6");
}

long double dot(const Matrix& a, const Matrix& b) {
  long double acc = 0;
  for (Eigen::Index p = 0; p < a.rows(); ++p)
    for (Eigen::Index r = 0; r < a.cols(); ++r)
      acc += static_cast<long double>(a(p, r)) * static_cast<long double>(b(p, r));
  return acc;
}

long double perturbed_quality_of(const Matrix& x, const Matrix& s,
                                 const PerturbationFunction& f) {
  long double acc = 0;
  for (Eigen::Index p = 0; p < x.rows(); ++p)
    for (Eigen::Index r = 0; r < x.cols(); ++r)
      acc += static_cast<long double>(s(p, r)) * f.value(x(p, r), s(p, r));
  return acc;
}

Matrix gradient_of(const Matrix& x, const Matrix& s, const PerturbationFunction& f) {
  Matrix g(x.rows(), x.cols());
  for (Eigen::Index p = 0; p < x.rows(); ++p)
    for (Eigen::Index r = 0; r < x.cols(); ++r)
      g(p, r) = s(p, r) * f.deriv(x(p, r), s(p, r));
  return g;
}

// Maximizer of a concave function on [lo, hi] by golden-section search.
template <typename F>
double golden_max(const F& f, double lo, double hi, double tol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  long double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

// KKT allocation of a single entry: the x in [0, cap] where s * f'(x) = mu,
// clamped at the box. Entries with s = 0 contribute nothing to the objective;
// they absorb mass only when mu <= 0.
double alloc_entry(const PerturbationFunction& f, double s, double mu, double cap) {
  const PerturbationSpec& spec = f.spec();
  double x;
  switch (spec.family) {
    case PerturbationFamily::quadratic: {
      if (s <= 0.0) return mu > 0.0 ? 0.0 : cap;
      x = (1.0 - mu / s) / (2.0 * spec.beta);
      break;
    }
    case PerturbationFamily::exponential: {
      if (s <= 0.0) return mu > 0.0 ? 0.0 : cap;
      if (mu <= 0.0) return cap;
      x = -std::log(mu / (s * spec.alpha)) / spec.alpha;
      break;
    }
    case PerturbationFamily::quadratic_targeted: {
      if (s <= 0.0) return mu > 0.0 ? 0.0 : cap;
      x = (s - mu) / (2.0 * spec.lambda);
      break;
    }
    case PerturbationFamily::entropy_targeted: {
      if (s <= 0.0) return mu > 0.0 ? 0.0 : cap;
      x = std::exp((s - mu) / spec.lambda - 1.0);
      break;
    }
    default:
      throw Error(Errc::invalid_parameter, "waterfill needs a strictly concave perturbation");
  }
  return std::clamp(x, 0.0, cap);
}

// Exact solution of one row of the relaxed problem (column caps dropped):
// maximize sum_r s_r f(x_r) subject to sum_r x_r = demand, 0 <= x_r <= cap.
void row_waterfill(const PerturbationFunction& f, const Matrix& similarity, int row,
                   double demand, double cap, Matrix* x) {
  const Eigen::Index nr = similarity.cols();
  const auto total_at = [&](double mu) {
    double t = 0.0;
    for (Eigen::Index r = 0; r < nr; ++r) t += alloc_entry(f, similarity(row, r), mu, cap);
    return t;
  };

  // Bracket so that total(hi) <= demand <= total(lo), then bisect.
  double hi = 1.0;
  for (int i = 0; i < 200 && total_at(hi) > demand; ++i) hi = hi * 2.0 + 1.0;
  double lo = -1.0;
  for (int i = 0; i < 200 && total_at(lo) < demand; ++i) lo = lo * 2.0 - 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi) + std::abs(lo));
       ++i) {
    const double mid = 0.5 * (lo + hi);
    if (total_at(mid) > demand)
      lo = mid;
    else
      hi = mid;
  }

  for (Eigen::Index r = 0; r < nr; ++r) (*x)(row, r) = alloc_entry(f, similarity(row, r), hi, cap);

  // The allocation is discontinuous only at mu = 0, where zero-similarity
  // entries switch from 0 to the cap. When the bisection lands on that jump,
  // those indifferent entries take the missing mass; any other deficit is
  // bisection residue and belongs to the interior entries.
  double deficit = demand - x->row(row).sum();
  if (lo <= 0.0 && hi >= 0.0 && deficit > 1e-9) {
    std::vector<Eigen::Index> zeros;
    for (Eigen::Index r = 0; r < nr; ++r)
      if (similarity(row, r) <= 0.0 && (*x)(row, r) < cap) zeros.push_back(r);
    while (deficit > 1e-12 && !zeros.empty()) {
      const double share = deficit / double(zeros.size());
      std::vector<Eigen::Index> still;
      for (Eigen::Index r : zeros) {
        const double add = std::min(share, cap - (*x)(row, r));
        (*x)(row, r) += add;
        deficit -= add;
        if ((*x)(row, r) < cap - 1e-15) still.push_back(r);
      }
      if (still.size() == zeros.size() && share <= 0) break;
      zeros.swap(still);
    }
  }
  deficit = demand - x->row(row).sum();
  if (std::abs(deficit) > 0) {
    std::vector<Eigen::Index> interior;
    for (Eigen::Index r = 0; r < nr; ++r)
      if ((*x)(row, r) > 1e-12 && (*x)(row, r) < cap - 1e-12) interior.push_back(r);
    if (!interior.empty()) {
      const double share = deficit / double(interior.size());
      for (Eigen::Index r : interior) (*x)(row, r) += share;
    }
  }
}

std::string vertex_key(const IntMatrix& units) {
  std::string key;
  key.reserve(sizeof(std::int64_t) * units.size());
  for (Eigen::Index p = 0; p < units.rows(); ++p)
    for (Eigen::Index r = 0; r < units.cols(); ++r) {
      const std::int64_t v = units(p, r);
      key.append(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  return key;
}

struct LinearVertex {
  Matrix x;
  IntMatrix units;
  long long augmentations = 0;
};

LinearVertex linear_vertex_max(const ProblemInstance& inst, const Matrix& objective,
                               const Rational& cap) {
  const std::int64_t w = cap.den;
  FlowNetwork net(inst.num_papers, inst.num_reviewers);
  for (int p = 0; p < inst.num_papers; ++p)
    net.paper_supply[p] = std::int64_t(inst.paper_demand) * w;
  for (int r = 0; r < inst.num_reviewers; ++r)
    net.reviewer_capacity[r] = std::int64_t(inst.reviewer_capacity) * w;

  const double max_abs = objective.cwiseAbs().maxCoeff();
  const double scale = max_abs > 0 ? kGradientScale / max_abs : 0.0;
  for (int p = 0; p < inst.num_papers; ++p)
    for (int r = 0; r < inst.num_reviewers; ++r)
      net.arcs(p, r).runs.push_back({std::llround(objective(p, r) * scale), cap.num});

  const FlowResult result = max_cost_max_flow(net);
  if (result.flow_value != std::int64_t(inst.num_papers) * inst.paper_demand * w)
    throw Error(Errc::infeasible, "no assignment satisfies the load constraints at this cap");

  LinearVertex vertex;
  vertex.units = result.units;
  vertex.x = result.units.cast<double>() / double(w);
  vertex.augmentations = result.augmentations;
  return vertex;
}

}  // namespace

FractionalAssignment maximize_linear_objective(const ProblemInstance& inst, const Matrix& c,
                                               const Rational& cap, SolverDiagnostics* diag) {
  require_representable_cap(cap);
  if (c.rows() != inst.num_papers || c.cols() != inst.num_reviewers)
    throw Error(Errc::dimension_mismatch, "objective dimensions do not match the instance");
  const auto start = Clock::now();
  LinearVertex vertex = linear_vertex_max(inst, c, cap);
  if (diag != nullptr) {
    diag->method = "flow-vertex";
    diag->iterations = 1;
    diag->augmentations = vertex.augmentations;
    diag->wall_seconds = seconds_since(start);
  }
  return FractionalAssignment{std::move(vertex.x)};
}

FractionalAssignment solve_plra(const ProblemInstance& inst, const Rational& cap,
                                SolverDiagnostics* diag) {
  FractionalAssignment a = maximize_linear_objective(inst, inst.similarity, cap, diag);
  if (diag != nullptr) diag->method = "plra";
  return a;
}

FractionalAssignment solve_pm_flow(const ProblemInstance& inst, const SolverConfig& cfg,
                                   SolverDiagnostics* diag) {
  require_representable_cap(cfg.cap);
  const auto start = Clock::now();
  const PerturbationFunction f = make_perturbation(cfg.perturbation);
  if (!f.differentiable())
    throw Error(Errc::not_differentiable,
                "the support-targeted perturbation is analysis-only; no solver accepts it");

  const FlowNetwork net = build_pm_network(inst, cfg.cap, f, cfg.precision);
  const FlowResult result = max_cost_max_flow(net);
  const int w = cfg.precision;
  Matrix x = result.units.cast<double>() / double(w);

  // Residual demand left by the floor(cap*w) arc capacities is topped up in
  // lexicographic pair order.
  std::vector<double> row_need(inst.num_papers), col_room(inst.num_reviewers);
  for (int p = 0; p < inst.num_papers; ++p) row_need[p] = inst.paper_demand - x.row(p).sum();
  for (int r = 0; r < inst.num_reviewers; ++r)
    col_room[r] = inst.reviewer_capacity - x.col(r).sum();
  const double cap_value = cfg.cap.value();
  for (int p = 0; p < inst.num_papers; ++p)
    for (int r = 0; r < inst.num_reviewers; ++r) {
      const double add =
          std::max(0.0, std::min({cap_value - x(p, r), row_need[p], col_room[r]}));
      if (add <= 0.0) continue;
      x(p, r) += add;
      row_need[p] -= add;
      col_room[r] -= add;
    }

  const double total = x.sum();
  if (std::abs(total - double(inst.num_papers) * inst.paper_demand) > 1e-6)
    throw Error(Errc::infeasible, "assignment demand cannot be met at this cap");

  if (diag != nullptr) {
    diag->method = "pm-flow";
    diag->iterations = 1;
    diag->augmentations = result.augmentations;
    diag->wall_seconds = seconds_since(start);
  }
  return FractionalAssignment{std::move(x)};
}

FractionalAssignment solve_pm_exact(const ProblemInstance& inst, const SolverConfig& cfg,
                                    SolverDiagnostics* diag) {
  require_representable_cap(cfg.cap);
  const auto start = Clock::now();
  const PerturbationFunction f = make_perturbation(cfg.perturbation);
  if (!f.differentiable())
    throw Error(Errc::not_differentiable,
                "the support-targeted perturbation is analysis-only; no solver accepts it");
  if (!check_feasibility(inst, cfg.cap))
    throw Error(Errc::infeasible, "no assignment satisfies the load constraints at this cap");

  const Matrix& s = inst.similarity;
  const double sum_s = s.sum();
  const double cap_value = cfg.cap.value();

  // The objective is separable, so with the column caps dropped each row has
  // a closed-form optimum. Whenever that relaxed optimum happens to respect
  // every column cap it is the global optimum and no iteration is needed.
  if (f.strictly_concave()) {
    Matrix x(inst.num_papers, inst.num_reviewers);
    for (int p = 0; p < inst.num_papers; ++p)
      row_waterfill(f, s, p, inst.paper_demand, cap_value, &x);
    bool columns_ok = true;
    for (int r = 0; r < inst.num_reviewers && columns_ok; ++r)
      if (x.col(r).sum() > inst.reviewer_capacity + 1e-10) columns_ok = false;
    if (columns_ok) {
      if (diag != nullptr) {
        diag->method = "waterfill";
        diag->iterations = 0;
        const Matrix g = gradient_of(x, s, f);
        const LinearVertex y = linear_vertex_max(inst, g, cfg.cap);
        diag->fw_gap = std::max(0.0, double(dot(g, y.x) - dot(g, x)));
        diag->augmentations = y.augmentations;
        diag->wall_seconds = seconds_since(start);
      }
      return FractionalAssignment{std::move(x)};
    }
  }

  // Conditional gradient with away steps over the vertex decomposition.
  LinearVertex start_vertex = linear_vertex_max(inst, s, cfg.cap);
  std::vector<Matrix> vertices{start_vertex.x};
  std::vector<double> weights{1.0};
  std::unordered_map<std::string, std::size_t> vertex_ids{
      {vertex_key(start_vertex.units), 0}};
  Matrix x = start_vertex.x;
  long long augmentations = start_vertex.augmentations;

  const double gap_stop = cfg.tol * std::max(sum_s, 1e-300);
  double gap = std::numeric_limits<double>::infinity();
  int iter = 0;
  while (iter < cfg.max_iters) {
    ++iter;
    const Matrix g = gradient_of(x, s, f);
    LinearVertex fw = linear_vertex_max(inst, g, cfg.cap);
    augmentations += fw.augmentations;
    gap = double(dot(g, fw.x) - dot(g, x));
    if (gap <= gap_stop) break;

    std::size_t away = 0;
    long double away_score = std::numeric_limits<long double>::max();
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      const long double v = dot(g, vertices[i]);
      if (v < away_score) {
        away_score = v;
        away = i;
      }
    }
    const long double gain_fw = gap;
    const long double gain_away = dot(g, x) - away_score;

    const bool use_away = gain_away > gain_fw && weights[away] < 1.0 - 1e-12;
    Matrix dir;
    double t_max;
    if (use_away) {
      dir = x - vertices[away];
      t_max = weights[away] / (1.0 - weights[away]);
    } else {
      dir = fw.x - x;
      t_max = 1.0;
    }

    const auto line = [&](double t) { return perturbed_quality_of(x + t * dir, s, f); };
    double t = golden_max(line, 0.0, t_max, 1e-12 * std::max(1.0, t_max));
    if (line(t_max) >= line(t)) t = t_max;
    if (t <= 0.0) break;  // no ascent left at line-search resolution

    x += t * dir;
    if (use_away) {
      for (double& wgt : weights) wgt *= 1.0 + t;
      weights[away] -= t;
    } else {
      for (double& wgt : weights) wgt *= 1.0 - t;
      const std::string key = vertex_key(fw.units);
      const auto [it, inserted] = vertex_ids.try_emplace(key, vertices.size());
      if (inserted) {
        vertices.push_back(fw.x);
        weights.push_back(0.0);
      }
      weights[it->second] += t;
    }

    // Prune dead vertices and counter the drift between x and its convex
    // decomposition.
    if (iter % 64 == 0 || t == t_max) {
      std::vector<Matrix> live_v;
      std::vector<double> live_w;
      vertex_ids.clear();
      double total = 0.0;
      for (std::size_t i = 0; i < vertices.size(); ++i)
        if (weights[i] > 1e-14) total += weights[i];
      Matrix rebuilt = Matrix::Zero(x.rows(), x.cols());
      for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (weights[i] <= 1e-14) continue;
        live_w.push_back(weights[i] / total);
        live_v.push_back(std::move(vertices[i]));
        rebuilt += live_w.back() * live_v.back();
      }
      vertices.swap(live_v);
      weights.swap(live_w);
      for (std::size_t i = 0; i < vertices.size(); ++i) {
        const IntMatrix units =
            (vertices[i] * double(cfg.cap.den)).array().round().cast<std::int64_t>().matrix();
        vertex_ids.emplace(vertex_key(units), i);
      }
      x = std::move(rebuilt);
    }
  }

  x = x.cwiseMax(0.0).cwiseMin(cap_value);
  if (diag != nullptr) {
    diag->method = "frank-wolfe";
    diag->iterations = iter;
    diag->fw_gap = std::max(0.0, gap);
    diag->augmentations = augmentations;
    diag->wall_seconds = seconds_since(start);
  }
  return FractionalAssignment{std::move(x)};
}

double max_quality(const ProblemInstance& inst) {
  if (std::int64_t(inst.num_papers) * inst.paper_demand >
          std::int64_t(inst.num_reviewers) * inst.reviewer_capacity ||
      inst.paper_demand > inst.num_reviewers)
    throw Error(Errc::infeasible, "loads are infeasible even without a cap");
  const FractionalAssignment x = solve_plra(inst, Rational(1, 1));
  return (x.probabilities.array() * inst.similarity.array()).sum();
}

std::optional<FractionalAssignment> solve_greedy(const ProblemInstance& inst,
                                                 const Rational& cap) {
  require_representable_cap(cap);
  if (!cap.times_at_least(inst.num_reviewers, inst.paper_demand))
    throw Error(Errc::infeasible, "cap times reviewer count is below the paper demand");

  Matrix x = Matrix::Zero(inst.num_papers, inst.num_reviewers);
  const std::int64_t full = (std::int64_t(inst.paper_demand) * cap.den) / cap.num;
  const double remainder =
      double(std::int64_t(inst.paper_demand) * cap.den - full * cap.num) / double(cap.den);

  std::vector<int> order(inst.num_reviewers);
  for (int p = 0; p < inst.num_papers; ++p) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return inst.similarity(p, a) > inst.similarity(p, b);
    });
    for (std::int64_t i = 0; i < full; ++i) x(p, order[std::size_t(i)]) = cap.value();
    if (remainder > 0.0) x(p, order[std::size_t(full)]) = remainder;
  }
  for (int r = 0; r < inst.num_reviewers; ++r)
    if (x.col(r).sum() > inst.reviewer_capacity + 1e-9) return std::nullopt;
  return FractionalAssignment{std::move(x)};
}

std::optional<FractionalAssignment> solve_balanced_greedy(const ProblemInstance& inst,
                                                          const Rational& cap) {
  require_representable_cap(cap);
  if (!cap.times_at_least(inst.num_reviewers, inst.paper_demand))
    throw Error(Errc::infeasible, "cap times reviewer count is below the paper demand");

  Matrix x = Matrix::Zero(inst.num_papers, inst.num_reviewers);
  for (int p = 0; p < inst.num_papers; ++p) {
    std::map<double, std::vector<int>, std::greater<>> groups;
    for (int r = 0; r < inst.num_reviewers; ++r) groups[inst.similarity(p, r)].push_back(r);
    // Remaining demand tracked as an exact multiple of 1/cap.den.
    std::int64_t remaining = std::int64_t(inst.paper_demand) * cap.den;
    for (const auto& [value, members] : groups) {
      if (remaining == 0) break;
      const std::int64_t group_full = cap.num * std::int64_t(members.size());
      if (remaining >= group_full) {
        for (int r : members) x(p, r) = cap.value();
        remaining -= group_full;
      } else {
        const double share = double(remaining) / double(cap.den) / double(members.size());
        for (int r : members) x(p, r) = share;
        remaining = 0;
      }
    }
  }
  for (int r = 0; r < inst.num_reviewers; ++r)
    if (x.col(r).sum() > inst.reviewer_capacity + 1e-9) return std::nullopt;
  return FractionalAssignment{std::move(x)};
}

}  // namespace randmatch
