#include "randmatch/io.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace randmatch {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos ? "" : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_value(const std::string& token, std::size_t row, std::size_t col) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::parse_error, "bad number '" + token + "' at row " + std::to_string(row) +
                                       ", column " + std::to_string(col));
  }
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

LabeledMatrix load_similarity_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot open '" + path + "'");

  LabeledMatrix result;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line))
    throw Error(Errc::parse_error, "'" + path + "' is empty");
  ++line_no;
  result.col_ids = split_fields(line);
  if (!result.col_ids.empty() && result.col_ids.front().empty())
    result.col_ids.erase(result.col_ids.begin());  // tolerate a corner cell
  if (result.col_ids.empty())
    throw Error(Errc::parse_error, "'" + path + "' has no reviewer columns");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != result.col_ids.size() + 1)
      throw Error(Errc::parse_error,
                  "row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(result.col_ids.size() + 1));
    result.row_ids.push_back(fields[0]);
    std::vector<double> values;
    values.reserve(fields.size() - 1);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const double v = parse_value(fields[c], line_no, c + 1);
      if (v < 0)
        throw Error(Errc::negative_similarity,
                    "negative similarity at row " + std::to_string(line_no) + ", column " +
                        std::to_string(c + 1));
      values.push_back(v);
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw Error(Errc::parse_error, "'" + path + "' has no data rows");

  result.values.resize(rows.size(), result.col_ids.size());
  for (std::size_t p = 0; p < rows.size(); ++p)
    for (std::size_t r = 0; r < rows[p].size(); ++r) result.values(p, r) = rows[p][r];
  return result;
}

void write_matrix_csv(std::ostream& out, const Matrix& values,
                      const std::vector<std::string>& row_ids,
                      const std::vector<std::string>& col_ids) {
  for (Eigen::Index r = 0; r < values.cols(); ++r) {
    if (r) out << ',';
    out << (r < Eigen::Index(col_ids.size()) ? col_ids[r] : "r" + std::to_string(r));
  }
  out << '\n';
  for (Eigen::Index p = 0; p < values.rows(); ++p) {
    out << (p < Eigen::Index(row_ids.size()) ? row_ids[p] : "p" + std::to_string(p));
    for (Eigen::Index r = 0; r < values.cols(); ++r) out << ',' << format_value(values(p, r));
    out << '\n';
  }
}

std::map<std::string, double> default_bid_levels() {
  return {{"yes", 1.0}, {"maybe", 0.5}, {"no", 0.25}, {"conflict", 0.0}};
}

LabeledMatrix load_bids(const std::string& path,
                        const std::map<std::string, double>& level_map,
                        const std::string& missing_level) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot open '" + path + "'");
  const auto missing = level_map.find(missing_level);
  if (missing == level_map.end())
    throw Error(Errc::unknown_level, "missing-pair level '" + missing_level + "' is not mapped");

  std::map<std::string, int> paper_index, reviewer_index;
  std::vector<std::string> paper_ids, reviewer_ids;
  struct Triple {
    int paper, reviewer;
    double value;
  };
  std::vector<Triple> triples;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 3)
      throw Error(Errc::parse_error, "row " + std::to_string(line_no) +
                                         " is not a (paper, reviewer, level) triple");
    const auto level = level_map.find(fields[2]);
    if (level == level_map.end())
      throw Error(Errc::unknown_level,
                  "unknown level '" + fields[2] + "' at row " + std::to_string(line_no));
    const auto paper = paper_index.try_emplace(fields[0], int(paper_ids.size()));
    if (paper.second) paper_ids.push_back(fields[0]);
    const auto reviewer = reviewer_index.try_emplace(fields[1], int(reviewer_ids.size()));
    if (reviewer.second) reviewer_ids.push_back(fields[1]);
    triples.push_back({paper.first->second, reviewer.first->second, level->second});
  }
  if (triples.empty()) throw Error(Errc::parse_error, "'" + path + "' has no triples");

  LabeledMatrix result;
  result.row_ids = std::move(paper_ids);
  result.col_ids = std::move(reviewer_ids);
  result.values = Matrix::Constant(result.row_ids.size(), result.col_ids.size(),
                                   missing->second);
  for (const Triple& t : triples) result.values(t.paper, t.reviewer) = t.value;
  return result;
}

std::vector<FrontierRow> run_frontier(const ProblemInstance& inst,
                                      const std::vector<double>& eta_grid,
                                      const std::vector<std::string>& algorithms,
                                      const TuningConfig& base, int max_threads) {
  for (double eta : eta_grid)
    if (!(eta > 0.0 && eta <= 1.0))
      throw Error(Errc::invalid_argument, "eta grid values must lie in (0, 1]");
  for (const std::string& alg : algorithms)
    if (alg != "plra" && alg != "pm-q" && alg != "pm-e")
      throw Error(Errc::invalid_argument, "unknown algorithm '" + alg + "'");

  std::vector<FrontierRow> rows(eta_grid.size() * algorithms.size());
  if (rows.empty()) return rows;
  const double best = max_quality(inst);

  const auto work = [&](std::size_t task) {
    FrontierRow& row = rows[task];
    row.eta = eta_grid[task / algorithms.size()];
    row.algorithm = algorithms[task % algorithms.size()];
    try {
      TuningConfig cfg = base;
      cfg.eta.reset();
      cfg.quality_floor = row.eta * best;
      FractionalAssignment x;
      const PerturbationFunction* metric_f = nullptr;
      PerturbationFunction f{PerturbationSpec{}};
      if (row.algorithm == "plra") {
        row.cap = find_q_plra(inst, *cfg.quality_floor, cfg.search_tol);
        row.param = 0.0;
        x = solve_plra(inst, row.cap);
      } else if (row.algorithm == "pm-q") {
        const QuadraticTuning t = tune_pm_quadratic(inst, cfg);
        row.cap = t.cap;
        row.param = t.beta;
        SolverConfig sc;
        sc.cap = t.cap;
        sc.perturbation.family = PerturbationFamily::quadratic;
        sc.perturbation.beta = t.beta;
        sc.tol = cfg.solver_tol;
        sc.max_iters = cfg.solver_max_iters;
        x = solve_pm_exact(inst, sc);
        f = make_perturbation(sc.perturbation);
        metric_f = &f;
      } else {
        const ExponentialTuning t = tune_pm_exponential(inst, cfg);
        row.cap = t.cap;
        row.param = t.alpha;
        SolverConfig sc;
        sc.cap = t.cap;
        sc.perturbation.family = PerturbationFamily::exponential;
        sc.perturbation.alpha = t.alpha;
        sc.tol = cfg.solver_tol;
        sc.max_iters = cfg.solver_max_iters;
        x = solve_pm_exact(inst, sc);
        f = make_perturbation(sc.perturbation);
        metric_f = &f;
      }
      row.metrics = compute_metrics(x, inst, metric_f);
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  };

  int threads = max_threads > 0 ? max_threads : int(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, int(rows.size())));
  if (threads == 1) {
    for (std::size_t task = 0; task < rows.size(); ++task) work(task);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i)
      pool.emplace_back([&] {
        for (std::size_t task = next++; task < rows.size(); task = next++) work(task);
      });
    for (std::thread& th : pool) th.join();
  }
  return rows;
}

void write_frontier_csv(std::ostream& out, const std::vector<FrontierRow>& rows) {
  out << "eta,algorithm,Q,param,quality,maxprob,avgmaxp,support,entropy,l2norm\n";
  for (const FrontierRow& row : rows) {
    if (row.failed) continue;
    out << format_value(row.eta) << ',' << row.algorithm << ',' << row.cap.to_string() << ','
        << format_value(row.param) << ',' << format_value(row.metrics.quality) << ','
        << format_value(row.metrics.maxprob) << ',' << format_value(row.metrics.avgmaxp) << ','
        << row.metrics.support << ',' << format_value(row.metrics.entropy) << ','
        << format_value(row.metrics.l2norm) << '\n';
  }
}

}  // namespace randmatch
