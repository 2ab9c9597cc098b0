#pragma once

#include "randmatch/instance.hpp"
#include "randmatch/metrics.hpp"
#include "randmatch/sampling.hpp"
#include "randmatch/solvers.hpp"
#include "randmatch/tuning.hpp"
#include "randmatch/types.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace randmatch {

/// A dense matrix with row and column labels, as stored on disk: the first
/// CSV line lists column (reviewer) ids, every following line is a row id
/// followed by the values.
struct LabeledMatrix {
  Matrix values;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
};

LabeledMatrix load_similarity_csv(const std::string& path);
void write_matrix_csv(std::ostream& out, const Matrix& values,
                      const std::vector<std::string>& row_ids,
                      const std::vector<std::string>& col_ids);

/// Default similarity for each bid level.
std::map<std::string, double> default_bid_levels();

/// Loads (paper, reviewer, level) triples. Ids are indexed in order of first
/// appearance; pairs that never appear get the `missing_level`'s similarity
/// (default "no", so absence is not treated as a conflict).
LabeledMatrix load_bids(const std::string& path,
                        const std::map<std::string, double>& level_map = default_bid_levels(),
                        const std::string& missing_level = "no");

struct FrontierRow {
  double eta = 0.0;
  std::string algorithm;
  Rational cap{0, 1};
  double param = 0.0;  // beta, alpha, or 0 for plra
  MetricsReport metrics;
  bool failed = false;
  std::string error;
};

/// Tunes and solves every (eta, algorithm) combination on the grid and
/// reports the six metrics per row. Grid points run concurrently up to
/// `max_threads`; row order is deterministic. Failed rows carry the error and
/// do not stop the rest.
std::vector<FrontierRow> run_frontier(const ProblemInstance& inst,
                                      const std::vector<double>& eta_grid,
                                      const std::vector<std::string>& algorithms,
                                      const TuningConfig& base, int max_threads);

void write_frontier_csv(std::ostream& out, const std::vector<FrontierRow>& rows);

/// Entry point behind the `randmatch` binary. Exit codes: 0 success, 1 domain
/// error (infeasibility, unreachable floor), 2 usage or parse error.
int cli_main(int argc, const char* const* argv);

}  // namespace randmatch
