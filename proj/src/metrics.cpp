#include "randmatch/metrics.hpp"

#include <cmath>

namespace randmatch {

ValidationReport validate_assignment(const FractionalAssignment& x,
                                     const ProblemInstance& inst) {
  ValidationReport report;
  const Matrix& m = x.probabilities;
  if (m.rows() != inst.num_papers || m.cols() != inst.num_reviewers) {
    report.violations.push_back("assignment dimensions do not match the instance");
    return report;
  }
  if ((m.array() < -1e-12).any() || (m.array() > 1.0 + 1e-12).any())
    report.violations.push_back("entry outside [0, 1]");
  for (Eigen::Index p = 0; p < m.rows(); ++p)
    if (std::abs(m.row(p).sum() - inst.paper_demand) > 1e-9) {
      report.violations.push_back("row sum differs from paper demand");
      break;
    }
  for (Eigen::Index r = 0; r < m.cols(); ++r)
    if (m.col(r).sum() > inst.reviewer_capacity + 1e-9) {
      report.violations.push_back("column sum exceeds reviewer capacity");
      break;
    }
  return report;
}

MetricsReport compute_metrics(const FractionalAssignment& x, const ProblemInstance& inst,
                              const PerturbationFunction* f) {
  const Matrix& m = x.probabilities;
  if (m.rows() != inst.num_papers || m.cols() != inst.num_reviewers)
    throw Error(Errc::dimension_mismatch, "assignment dimensions do not match the instance");

  MetricsReport report;
  report.quality = (m.array() * inst.similarity.array()).sum();
  report.maxprob = m.size() ? m.maxCoeff() : 0.0;
  report.avgmaxp = m.size() ? m.rowwise().maxCoeff().mean() : 0.0;
  report.support = (m.array() > kSupportTol).count();
  double entropy = 0.0;
  for (Eigen::Index p = 0; p < m.rows(); ++p)
    for (Eigen::Index r = 0; r < m.cols(); ++r)
      if (m(p, r) > 0.0) entropy -= m(p, r) * std::log(m(p, r));
  report.entropy = entropy;
  report.l2norm = m.norm();
  if (f != nullptr) {
    double pq = 0.0;
    for (Eigen::Index p = 0; p < m.rows(); ++p)
      for (Eigen::Index r = 0; r < m.cols(); ++r)
        pq += inst.similarity(p, r) * f->value(m(p, r), inst.similarity(p, r));
    report.perturbed_quality = pq;
  }
  return report;
}

}  // namespace randmatch
