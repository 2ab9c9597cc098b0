#include "randmatch/instance.hpp"

#include "randmatch/flow.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace randmatch {

ValidationReport validate_instance(const ProblemInstance& inst) {
  ValidationReport report;
  if (inst.num_papers < 1) report.violations.push_back("num_papers < 1");
  if (inst.num_reviewers < 1) report.violations.push_back("num_reviewers < 1");
  if (inst.paper_demand < 1) report.violations.push_back("paper_demand < 1");
  if (inst.num_reviewers >= 1 && inst.paper_demand > inst.num_reviewers)
    report.violations.push_back("paper_demand exceeds number of reviewers");
  if (inst.reviewer_capacity < 1) report.violations.push_back("reviewer_capacity < 1");
  if (inst.similarity.rows() != inst.num_papers || inst.similarity.cols() != inst.num_reviewers)
    report.violations.push_back("similarity matrix dimensions do not match counts");
  else {
    bool negative = false, nonfinite = false;
    for (Eigen::Index p = 0; p < inst.similarity.rows(); ++p)
      for (Eigen::Index r = 0; r < inst.similarity.cols(); ++r) {
        const double s = inst.similarity(p, r);
        if (!std::isfinite(s)) nonfinite = true;
        else if (s < 0) negative = true;
      }
    if (negative) report.violations.push_back("negative similarity");
    if (nonfinite) report.violations.push_back("non-finite similarity");
  }
  const std::int64_t demand = std::int64_t(inst.num_papers) * inst.paper_demand;
  const std::int64_t capacity = std::int64_t(inst.num_reviewers) * inst.reviewer_capacity;
  if (demand > capacity) report.violations.push_back("load infeasible");
  return report;
}

double dominance_factor(const Matrix& a) {
  double dom = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i == j) continue;
      if (a(i, j) <= 0) continue;  // ratio is +inf, never the minimum
      dom = std::min(dom, a(i, i) / a(i, j));
    }
  return dom;
}

ValidationReport validate_blockwise_spec(const BlockwiseSpec& spec) {
  ValidationReport report;
  const Eigen::Index k = spec.block_identity.rows();
  if (k < 1 || spec.block_identity.cols() != k)
    report.violations.push_back("block identity must be square and nonempty");
  if (static_cast<Eigen::Index>(spec.paper_sizes.size()) != k ||
      static_cast<Eigen::Index>(spec.reviewer_sizes.size()) != k)
    report.violations.push_back("block size lists must have one entry per area");
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < spec.block_identity.cols(); ++j) {
      if (spec.block_identity(i, j) < 0)
        report.violations.push_back("block identity has a negative entry");
      if (i != j && spec.block_identity(i, i) <= spec.block_identity(i, j)) {
        report.violations.push_back("diagonal does not strictly dominate its row");
        i = k;  // one message is enough
        break;
      }
    }
  for (int s : spec.paper_sizes)
    if (s < 1) report.violations.push_back("paper block size < 1");
  for (int s : spec.reviewer_sizes)
    if (s < 1) report.violations.push_back("reviewer block size < 1");
  return report;
}

ProblemInstance generate_blockwise(const BlockwiseSpec& spec, int paper_demand,
                                   int reviewer_capacity) {
  const ValidationReport report = validate_blockwise_spec(spec);
  if (!report.ok())
    throw Error(Errc::invalid_parameter, "invalid blockwise spec: " + report.violations.front());

  ProblemInstance inst;
  inst.num_papers = std::accumulate(spec.paper_sizes.begin(), spec.paper_sizes.end(), 0);
  inst.num_reviewers = std::accumulate(spec.reviewer_sizes.begin(), spec.reviewer_sizes.end(), 0);
  inst.paper_demand = paper_demand;
  inst.reviewer_capacity = reviewer_capacity;
  inst.similarity.resize(inst.num_papers, inst.num_reviewers);

  int row = 0;
  for (std::size_t i = 0; i < spec.paper_sizes.size(); ++i) {
    for (int p = 0; p < spec.paper_sizes[i]; ++p, ++row) {
      int col = 0;
      for (std::size_t j = 0; j < spec.reviewer_sizes.size(); ++j)
        for (int r = 0; r < spec.reviewer_sizes[j]; ++r, ++col)
          inst.similarity(row, col) = spec.block_identity(i, j);
    }
  }
  return inst;
}

ProblemInstance generate_random_discrete(int num_papers, int num_reviewers,
                                         const RandomDiscreteSpec& spec, int paper_demand,
                                         int reviewer_capacity) {
  if (spec.levels.empty())
    throw Error(Errc::invalid_parameter, "level set is empty");
  for (std::size_t i = 0; i < spec.levels.size(); ++i) {
    if (spec.levels[i] <= 0)
      throw Error(Errc::invalid_parameter, "levels must be positive");
    if (i > 0 && spec.levels[i] <= spec.levels[i - 1])
      throw Error(Errc::invalid_parameter, "levels must be strictly increasing");
  }
  if (num_papers < 1 || num_reviewers < 1)
    throw Error(Errc::invalid_parameter, "instance dimensions must be positive");

  ProblemInstance inst;
  inst.num_papers = num_papers;
  inst.num_reviewers = num_reviewers;
  inst.paper_demand = paper_demand;
  inst.reviewer_capacity = reviewer_capacity;
  inst.similarity.resize(num_papers, num_reviewers);
  SplitMix64 rng(spec.seed);
  // Row-major fill so the matrix is a pure function of the seed.
  for (int p = 0; p < num_papers; ++p)
    for (int r = 0; r < num_reviewers; ++r)
      inst.similarity(p, r) = spec.levels[rng.next_below(spec.levels.size())];
  return inst;
}

bool check_feasibility(const ProblemInstance& inst, const Rational& cap) {
  if (cap.num <= 0 || Rational(1, 1) < cap)
    throw Error(Errc::invalid_cap, "cap must lie in (0, 1]");
  // Pair capacity cap*w is integral with w = cap.den, so the scaled flow
  // polytope is exactly the assignment polytope scaled by w.
  const std::int64_t w = cap.den;
  FlowNetwork net(inst.num_papers, inst.num_reviewers);
  for (int p = 0; p < inst.num_papers; ++p) net.paper_supply[p] = inst.paper_demand * w;
  for (int r = 0; r < inst.num_reviewers; ++r)
    net.reviewer_capacity[r] = inst.reviewer_capacity * w;
  for (int p = 0; p < inst.num_papers; ++p)
    for (int r = 0; r < inst.num_reviewers; ++r)
      net.arcs(p, r).runs.push_back({0, cap.num});
  const FlowResult result = max_cost_max_flow(net);
  return result.flow_value == std::int64_t(inst.num_papers) * inst.paper_demand * w;
}

}  // namespace randmatch
