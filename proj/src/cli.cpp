#include "randmatch/io.hpp"

#include "randmatch/flow.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace randmatch {

namespace {

using nlohmann::json;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::parse_error:
    case Errc::unknown_level:
    case Errc::invalid_argument:
    case Errc::invalid_parameter:
      return 2;
    default:
      return 1;
  }
}

struct InstanceOptions {
  std::string sim_path;
  std::string bids_path;
  int lp = 1;
  int lr = 1;
  std::vector<std::string> level_map_entries;
  std::string missing_level = "no";
};

void add_instance_options(CLI::App* cmd, InstanceOptions* opts) {
  cmd->add_option("--sim", opts->sim_path, "similarity matrix CSV (header: reviewer ids)");
  cmd->add_option("--bids", opts->bids_path, "bid triples CSV: paper,reviewer,level");
  cmd->add_option("--lp", opts->lp, "reviewers required per paper")->check(CLI::PositiveNumber);
  cmd->add_option("--lr", opts->lr, "max papers per reviewer")->check(CLI::PositiveNumber);
  cmd->add_option("--level-map", opts->level_map_entries,
                  "bid level mapping, e.g. yes=1 maybe=0.5 no=0.25 conflict=0");
  cmd->add_option("--missing-level", opts->missing_level,
                  "level assumed for pairs absent from the bids file");
}

std::map<std::string, double> parse_level_map(const std::vector<std::string>& entries) {
  std::map<std::string, double> map = default_bid_levels();
  for (const std::string& entry : entries) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::parse_error, "level mapping '" + entry + "' is not name=value");
    try {
      map[entry.substr(0, eq)] = std::stod(entry.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(Errc::parse_error, "bad level value in '" + entry + "'");
    }
  }
  return map;
}

struct LoadedInstance {
  ProblemInstance instance;
  std::vector<std::string> paper_ids, reviewer_ids;
};

LoadedInstance load_instance(const InstanceOptions& opts) {
  if (opts.sim_path.empty() == opts.bids_path.empty())
    throw Error(Errc::invalid_argument, "give exactly one of --sim or --bids");
  LabeledMatrix m = opts.sim_path.empty()
                        ? load_bids(opts.bids_path, parse_level_map(opts.level_map_entries),
                                    opts.missing_level)
                        : load_similarity_csv(opts.sim_path);
  LoadedInstance loaded;
  loaded.instance.num_papers = int(m.values.rows());
  loaded.instance.num_reviewers = int(m.values.cols());
  loaded.instance.paper_demand = opts.lp;
  loaded.instance.reviewer_capacity = opts.lr;
  loaded.instance.similarity = std::move(m.values);
  loaded.paper_ids = std::move(m.row_ids);
  loaded.reviewer_ids = std::move(m.col_ids);
  const ValidationReport report = validate_instance(loaded.instance);
  if (!report.ok())
    throw Error(Errc::malformed_input, "invalid instance: " + report.violations.front());
  return loaded;
}

json metrics_to_json(const MetricsReport& m) {
  json j{{"quality", m.quality},   {"maxprob", m.maxprob}, {"avgmaxp", m.avgmaxp},
         {"support", m.support},   {"entropy", m.entropy}, {"l2norm", m.l2norm},
         {"support_tol", m.support_tol}};
  if (m.perturbed_quality) j["pquality"] = *m.perturbed_quality;
  return j;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index p = 0; p < m.rows(); ++p) {
    json row = json::array();
    for (Eigen::Index r = 0; r < m.cols(); ++r) row.push_back(m(p, r));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_array())
    throw Error(Errc::parse_error, "assignment must be an array of arrays");
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t p = 0; p < rows.size(); ++p) {
    if (rows[p].size() != rows[0].size())
      throw Error(Errc::parse_error, "ragged assignment matrix");
    for (std::size_t r = 0; r < rows[p].size(); ++r) m(p, r) = rows[p][r].get<double>();
  }
  return m;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(Errc::invalid_argument, "cannot write '" + path + "'");
  out << content;
}

json diagnostics_to_json(const SolverDiagnostics& d) {
  return json{{"method", d.method},
              {"iterations", d.iterations},
              {"fw_gap", d.fw_gap},
              {"augmentations", d.augmentations},
              {"wall_seconds", d.wall_seconds}};
}

struct ReportInputs {
  json report;
  ProblemInstance instance;  // similarity reloaded when available, else zeros
  FractionalAssignment assignment;
  bool has_similarity = false;
};

ReportInputs load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot open '" + path + "'");
  ReportInputs inputs;
  try {
    in >> inputs.report;
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, "bad report JSON in '" + path + "': " + e.what());
  }
  const json& cfg = inputs.report.at("config");
  inputs.assignment.probabilities = matrix_from_json(inputs.report.at("assignment"));
  inputs.instance.num_papers = int(inputs.assignment.probabilities.rows());
  inputs.instance.num_reviewers = int(inputs.assignment.probabilities.cols());
  inputs.instance.paper_demand = cfg.at("lp").get<int>();
  inputs.instance.reviewer_capacity = cfg.at("lr").get<int>();
  const std::string sim = cfg.value("sim", "");
  if (!sim.empty()) {
    std::ifstream probe(sim);
    if (probe) {
      inputs.instance.similarity = load_similarity_csv(sim).values;
      inputs.has_similarity = true;
    }
  }
  if (!inputs.has_similarity)
    inputs.instance.similarity =
        Matrix::Zero(inputs.instance.num_papers, inputs.instance.num_reviewers);
  return inputs;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    try {
      values.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw Error(Errc::parse_error, "bad number '" + token + "' in list");
    }
  }
  return values;
}

std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> names;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) names.push_back(token);
  }
  return names;
}

int env_thread_cap() {
  const char* env = std::getenv("RANDMATCH_THREADS");
  if (env == nullptr) return 0;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Randomized reviewer-paper assignment toolkit"};
  app.require_subcommand(1);

  // solve
  InstanceOptions solve_inst;
  std::string solve_q = "1";
  std::string solve_perturb = "linear";
  std::string solve_method;  // inferred when empty
  int solve_w = 0;
  double solve_tol = 1e-8;
  int solve_max_iters = 2000;
  std::string solve_out;
  CLI::App* solve_cmd = app.add_subcommand("solve", "compute a randomized assignment");
  add_instance_options(solve_cmd, &solve_inst);
  solve_cmd->add_option("-Q,--cap", solve_q, "entrywise probability cap (decimal or a/b)");
  solve_cmd->add_option("--perturb", solve_perturb,
                        "perturbation: linear, quad:B, exp:A, tq:L, te:L");
  solve_cmd->add_option("--w", solve_w, "flow precision; selects the flow solver");
  solve_cmd->add_option("--method", solve_method, "plra, pm-flow or pm-exact");
  solve_cmd->add_option("--tol", solve_tol, "duality-gap tolerance of the exact solver");
  solve_cmd->add_option("--max-iters", solve_max_iters, "iteration cap of the exact solver");
  solve_cmd->add_option("--out", solve_out, "report JSON path (default stdout)");

  // metrics
  std::string metrics_in, metrics_assignment, metrics_perturb, metrics_out;
  InstanceOptions metrics_inst;
  CLI::App* metrics_cmd = app.add_subcommand("metrics", "evaluate an assignment");
  metrics_cmd->add_option("--in", metrics_in, "run report JSON to evaluate");
  metrics_cmd->add_option("--assignment", metrics_assignment, "assignment matrix CSV");
  add_instance_options(metrics_cmd, &metrics_inst);
  metrics_cmd->add_option("--perturb", metrics_perturb, "also report the perturbed quality");
  metrics_cmd->add_option("--out", metrics_out, "output JSON path (default stdout)");

  // sample
  std::string sample_in, sample_out;
  std::uint64_t sample_seed = 0;
  int sample_count = 1;
  CLI::App* sample_cmd = app.add_subcommand("sample", "draw deterministic assignments");
  sample_cmd->add_option("--in", sample_in, "run report JSON")->required();
  sample_cmd->add_option("--seed", sample_seed, "PRNG seed")->required();
  sample_cmd->add_option("--samples", sample_count, "number of draws")
      ->check(CLI::PositiveNumber);
  sample_cmd->add_option("--out", sample_out, "output JSON path (default stdout)");

  // decompose
  std::string decompose_in, decompose_out;
  CLI::App* decompose_cmd =
      app.add_subcommand("decompose", "express an assignment as a lottery");
  decompose_cmd->add_option("--in", decompose_in, "run report JSON")->required();
  decompose_cmd->add_option("--out", decompose_out, "output JSON path (default stdout)");

  // tune
  InstanceOptions tune_inst;
  std::string tune_algorithm = "pm-q";
  std::string tune_out;
  double tune_floor = -1, tune_eta = -1, tune_delta = 0.0, tune_search_tol = 1e-3;
  double tune_alpha_max = 64.0;
  double tune_tol = 1e-8;
  CLI::App* tune_cmd = app.add_subcommand("tune", "search cap and perturbation strength");
  add_instance_options(tune_cmd, &tune_inst);
  tune_cmd->add_option("--floor", tune_floor, "absolute quality floor");
  tune_cmd->add_option("--eta", tune_eta, "quality floor as a fraction of the maximum");
  tune_cmd->add_option("--delta", tune_delta, "cap slack above the PLRA cap");
  tune_cmd->add_option("--algorithm", tune_algorithm, "plra, pm-q or pm-e");
  tune_cmd->add_option("--search-tol", tune_search_tol, "cap/beta grid resolution");
  tune_cmd->add_option("--alpha-max", tune_alpha_max, "upper end of the alpha range");
  tune_cmd->add_option("--tol", tune_tol, "solver tolerance for probes");
  tune_cmd->add_option("--out", tune_out, "output JSON path (default stdout)");

  // frontier
  InstanceOptions frontier_inst;
  std::string frontier_etas = "0.8,0.85,0.9,0.95,0.98,0.99,0.995,1.0";
  std::string frontier_algorithms = "plra,pm-q,pm-e";
  std::string frontier_out;
  double frontier_delta = 0.0, frontier_search_tol = 1e-3, frontier_tol = 1e-8;
  CLI::App* frontier_cmd =
      app.add_subcommand("frontier", "quality/randomness trade-off table");
  add_instance_options(frontier_cmd, &frontier_inst);
  frontier_cmd->add_option("--eta-grid", frontier_etas, "comma-separated quality fractions");
  frontier_cmd->add_option("--algorithms", frontier_algorithms,
                           "comma-separated subset of plra,pm-q,pm-e");
  frontier_cmd->add_option("--delta", frontier_delta, "cap slack above the PLRA cap");
  frontier_cmd->add_option("--search-tol", frontier_search_tol, "grid resolution");
  frontier_cmd->add_option("--tol", frontier_tol, "solver tolerance");
  frontier_cmd->add_option("--out", frontier_out, "output CSV path (default stdout)");

  // generate
  std::string gen_kind = "random";
  std::string gen_identity = "1,0;0,1";
  std::string gen_paper_sizes = "3,2", gen_reviewer_sizes = "3,2";
  std::string gen_levels = "0.25,0.5,1";
  int gen_np = 10, gen_nr = 10, gen_lp = 1, gen_lr = 1;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  CLI::App* gen_cmd = app.add_subcommand("generate", "write a synthetic similarity CSV");
  gen_cmd->add_option("--kind", gen_kind, "blockwise or random")->required();
  gen_cmd->add_option("--block-identity", gen_identity, "rows ';'-separated, e.g. 1,0;0,1");
  gen_cmd->add_option("--paper-sizes", gen_paper_sizes, "papers per block");
  gen_cmd->add_option("--reviewer-sizes", gen_reviewer_sizes, "reviewers per block");
  gen_cmd->add_option("--np", gen_np, "papers (random kind)");
  gen_cmd->add_option("--nr", gen_nr, "reviewers (random kind)");
  gen_cmd->add_option("--levels", gen_levels, "similarity levels (random kind)");
  gen_cmd->add_option("--seed", gen_seed, "PRNG seed (random kind)");
  gen_cmd->add_option("--lp", gen_lp, "reviewers required per paper");
  gen_cmd->add_option("--lr", gen_lr, "max papers per reviewer");
  gen_cmd->add_option("--out", gen_out, "output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve_cmd->parsed()) {
      const LoadedInstance loaded = load_instance(solve_inst);
      const Rational cap = Rational::parse(solve_q);
      const PerturbationSpec perturb = PerturbationSpec::parse(solve_perturb);
      std::string method = solve_method;
      if (method.empty()) {
        if (perturb.family == PerturbationFamily::linear)
          method = "plra";
        else
          method = solve_w > 0 ? "pm-flow" : "pm-exact";
      }

      SolverConfig sc;
      sc.cap = cap;
      sc.perturbation = perturb;
      sc.precision = solve_w > 0 ? solve_w : 10;
      sc.tol = solve_tol;
      sc.max_iters = solve_max_iters;

      SolverDiagnostics diag;
      FractionalAssignment x;
      if (method == "plra")
        x = solve_plra(loaded.instance, cap, &diag);
      else if (method == "pm-flow")
        x = solve_pm_flow(loaded.instance, sc, &diag);
      else if (method == "pm-exact")
        x = solve_pm_exact(loaded.instance, sc, &diag);
      else
        throw Error(Errc::invalid_argument, "unknown method '" + method + "'");

      const PerturbationFunction f = make_perturbation(perturb);
      const bool want_pquality = perturb.family != PerturbationFamily::linear;
      const MetricsReport metrics =
          compute_metrics(x, loaded.instance, want_pquality ? &f : nullptr);

      json report;
      report["config"] = {{"subcommand", "solve"},
                          {"sim", solve_inst.sim_path},
                          {"bids", solve_inst.bids_path},
                          {"lp", loaded.instance.paper_demand},
                          {"lr", loaded.instance.reviewer_capacity},
                          {"Q", cap.to_string()},
                          {"Q_value", cap.value()},
                          {"perturb", solve_perturb},
                          {"method", method},
                          {"w", sc.precision},
                          {"tol", sc.tol},
                          {"max_iters", sc.max_iters},
                          {"support_tol", kSupportTol},
                          {"cost_scale", kCostScale}};
      report["instance"] = {{"papers", loaded.instance.num_papers},
                            {"reviewers", loaded.instance.num_reviewers}};
      report["assignment"] = matrix_to_json(x.probabilities);
      report["metrics"] = metrics_to_json(metrics);
      report["diagnostics"] = diagnostics_to_json(diag);
      write_output(solve_out, report.dump(2) + "\n");
      return 0;
    }

    if (metrics_cmd->parsed()) {
      FractionalAssignment x;
      ProblemInstance inst;
      if (!metrics_in.empty()) {
        ReportInputs inputs = load_report(metrics_in);
        if (!inputs.has_similarity)
          throw Error(Errc::invalid_argument,
                      "the report does not point to a readable similarity file");
        x = std::move(inputs.assignment);
        inst = std::move(inputs.instance);
      } else if (!metrics_assignment.empty()) {
        const LoadedInstance loaded = load_instance(metrics_inst);
        inst = loaded.instance;
        x.probabilities = load_similarity_csv(metrics_assignment).values;
      } else {
        throw Error(Errc::invalid_argument, "give --in or --assignment");
      }
      std::optional<PerturbationFunction> f;
      if (!metrics_perturb.empty())
        f.emplace(make_perturbation(PerturbationSpec::parse(metrics_perturb)));
      const MetricsReport metrics = compute_metrics(x, inst, f ? &*f : nullptr);
      write_output(metrics_out, metrics_to_json(metrics).dump(2) + "\n");
      return 0;
    }

    if (sample_cmd->parsed()) {
      ReportInputs inputs = load_report(sample_in);
      const AssignmentDistribution dist = decompose(inputs.assignment, inputs.instance);
      json draws = json::array();
      for (int i = 0; i < sample_count; ++i) {
        const DeterministicAssignment pick =
            sample_assignment(dist, sample_seed + std::uint64_t(i));
        json rows = json::array();
        for (Eigen::Index p = 0; p < pick.assignment.rows(); ++p) {
          json row = json::array();
          for (Eigen::Index r = 0; r < pick.assignment.cols(); ++r)
            row.push_back(pick.assignment(p, r));
          rows.push_back(std::move(row));
        }
        draws.push_back(std::move(rows));
      }
      json out{{"seed", sample_seed}, {"samples", draws}};
      write_output(sample_out, out.dump(2) + "\n");
      return 0;
    }

    if (decompose_cmd->parsed()) {
      ReportInputs inputs = load_report(decompose_in);
      const AssignmentDistribution dist = decompose(inputs.assignment, inputs.instance);
      json components = json::array();
      for (std::size_t i = 0; i < dist.components.size(); ++i) {
        json rows = json::array();
        const BinaryMatrix& m = dist.components[i].assignment;
        for (Eigen::Index p = 0; p < m.rows(); ++p) {
          json row = json::array();
          for (Eigen::Index r = 0; r < m.cols(); ++r) row.push_back(m(p, r));
          rows.push_back(std::move(row));
        }
        components.push_back(json{{"weight", dist.weights[i]}, {"assignment", rows}});
      }
      write_output(decompose_out, json{{"components", components}}.dump(2) + "\n");
      return 0;
    }

    if (tune_cmd->parsed()) {
      const LoadedInstance loaded = load_instance(tune_inst);
      TuningConfig cfg;
      if (tune_floor >= 0) cfg.quality_floor = tune_floor;
      if (tune_eta >= 0) cfg.eta = tune_eta;
      cfg.delta = tune_delta;
      cfg.search_tol = tune_search_tol;
      cfg.alpha_max = tune_alpha_max;
      cfg.solver_tol = tune_tol;

      json out;
      if (tune_algorithm == "plra") {
        const double floor = resolve_floor(loaded.instance, cfg);
        const Rational q = find_q_plra(loaded.instance, floor, cfg.search_tol);
        out = {{"algorithm", "plra"}, {"Q", q.to_string()}, {"Q_value", q.value()},
               {"floor", floor}};
      } else if (tune_algorithm == "pm-q") {
        const QuadraticTuning t = tune_pm_quadratic(loaded.instance, cfg);
        out = {{"algorithm", "pm-q"},          {"Q", t.cap.to_string()},
               {"Q_value", t.cap.value()},     {"beta", t.beta},
               {"q_plra", t.q_plra.to_string()}, {"quality", t.quality},
               {"floor", resolve_floor(loaded.instance, cfg)}};
      } else if (tune_algorithm == "pm-e") {
        const ExponentialTuning t = tune_pm_exponential(loaded.instance, cfg);
        out = {{"algorithm", "pm-e"},          {"Q", t.cap.to_string()},
               {"Q_value", t.cap.value()},     {"alpha", t.alpha},
               {"q_plra", t.q_plra.to_string()}, {"quality", t.quality},
               {"floor", resolve_floor(loaded.instance, cfg)}};
      } else {
        throw Error(Errc::invalid_argument, "unknown algorithm '" + tune_algorithm + "'");
      }
      write_output(tune_out, out.dump(2) + "\n");
      return 0;
    }

    if (frontier_cmd->parsed()) {
      const LoadedInstance loaded = load_instance(frontier_inst);
      TuningConfig cfg;
      cfg.delta = frontier_delta;
      cfg.search_tol = frontier_search_tol;
      cfg.solver_tol = frontier_tol;
      const std::vector<FrontierRow> rows =
          run_frontier(loaded.instance, parse_double_list(frontier_etas),
                       parse_name_list(frontier_algorithms), cfg, env_thread_cap());
      std::ostringstream csv;
      write_frontier_csv(csv, rows);
      write_output(frontier_out, csv.str());
      bool any_failed = false;
      for (const FrontierRow& row : rows)
        if (row.failed) {
          any_failed = true;
          std::cerr << "frontier: eta " << row.eta << " " << row.algorithm
                    << " failed: " << row.error << "\n";
        }
      return any_failed ? 1 : 0;
    }

    if (gen_cmd->parsed()) {
      ProblemInstance inst;
      if (gen_kind == "blockwise") {
        BlockwiseSpec spec;
        std::vector<std::vector<double>> rows;
        std::stringstream ss(gen_identity);
        std::string row_text;
        while (std::getline(ss, row_text, ';')) rows.push_back(parse_double_list(row_text));
        if (rows.empty()) throw Error(Errc::parse_error, "empty block identity");
        spec.block_identity.resize(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (rows[i].size() != rows[0].size())
            throw Error(Errc::parse_error, "ragged block identity");
          for (std::size_t j = 0; j < rows[i].size(); ++j)
            spec.block_identity(i, j) = rows[i][j];
        }
        for (double v : parse_double_list(gen_paper_sizes)) spec.paper_sizes.push_back(int(v));
        for (double v : parse_double_list(gen_reviewer_sizes))
          spec.reviewer_sizes.push_back(int(v));
        inst = generate_blockwise(spec, gen_lp, gen_lr);
      } else if (gen_kind == "random") {
        RandomDiscreteSpec spec;
        spec.levels = parse_double_list(gen_levels);
        spec.seed = gen_seed;
        inst = generate_random_discrete(gen_np, gen_nr, spec, gen_lp, gen_lr);
      } else {
        throw Error(Errc::invalid_argument, "unknown kind '" + gen_kind + "'");
      }
      std::vector<std::string> paper_ids, reviewer_ids;
      for (int p = 0; p < inst.num_papers; ++p) paper_ids.push_back("p" + std::to_string(p));
      for (int r = 0; r < inst.num_reviewers; ++r)
        reviewer_ids.push_back("r" + std::to_string(r));
      std::ostringstream csv;
      write_matrix_csv(csv, inst.similarity, paper_ids, reviewer_ids);
      write_output(gen_out, csv.str());
      return 0;
    }

    throw Error(Errc::invalid_argument, "no subcommand selected");
  } catch (const Error& e) {
    std::cerr << "randmatch: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "randmatch: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace randmatch
