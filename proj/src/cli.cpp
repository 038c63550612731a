#include "capcov/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "capcov/analysis.hpp"
#include "capcov/benchmarks.hpp"
#include "capcov/error.hpp"
#include "capcov/instance.hpp"
#include "capcov/lpsolver.hpp"
#include "capcov/simulator.hpp"

namespace capcov {

namespace {

constexpr double kDefaultRateCap = 0.1;

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kInvalidArgument, "cannot write " + path);
  f << text;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kSchema:
      return kExitUsage;
    case ErrorKind::kLpSize:
    case ErrorKind::kCapacityCap:
      return kExitLpSize;
    case ErrorKind::kSearchOverflow:
      return kExitOracle;
    default:
      return kExitFailure;
  }
}

struct GenArgs {
  bool star = false;
  bool random = false;
  int n = 20;
  double eps = 0.01;
  RandomInstanceParams params;
  std::optional<std::uint64_t> seed;
  std::string utility = "coverage";
  std::string output;
};

struct SolveArgs {
  std::string model;
  std::string instance;
  std::string output;
  std::string dump_lp;
  std::int64_t max_vars = kDefaultConfigMaxVars;
  double rate_cap = kDefaultRateCap;
  bool no_split = false;
};

struct SimulateArgs {
  std::string model;
  std::string instance;
  std::vector<std::string> policies;
  long trials = 100000;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string opt = "none";
  long opt_trials = 0;
  std::string csv;
  std::string json;
  std::string instance_id;
  bool greedy_skip_zero = false;
  std::int64_t max_vars = kDefaultConfigMaxVars;
  double rate_cap = kDefaultRateCap;
  bool no_split = false;
};

struct AnalysisArgs {
  long trials = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string output;
};

Instance prepare_online(Instance instance, Model model, double rate_cap, bool no_split) {
  if (model == Model::kOnCsm && !no_split) return split_high_rate_types(instance, rate_cap);
  return instance;
}

int cmd_gen(const GenArgs& a, std::ostream& out, std::ostream& err) {
  if (a.star == a.random) {
    err << "gen: choose exactly one of --star or --random\n";
    return kExitUsage;
  }
  Instance inst;
  if (a.star) {
    inst = gen_star_example(a.n, a.eps);
  } else {
    if (!a.seed) {
      err << "gen: --random requires --seed\n";
      return kExitUsage;
    }
    RandomInstanceParams p = a.params;
    p.seed = *a.seed;
    p.utility = utility_kind_from_string(a.utility);
    inst = gen_random(p);
  }
  const auto violations = validate(inst);
  err << "generated " << inst.num_tasks() << " tasks, " << inst.num_workers() << " workers, "
      << inst.num_edges() << " edges; " << violations.size() << " validation issues\n";
  for (const auto& v : violations) err << "  " << v << "\n";
  write_text(a.output, to_json_string(inst), out);
  return violations.empty() ? kExitOk : kExitFailure;
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const Model model = model_from_string(a.model);
  Instance inst = load_json(a.instance);
  if (model != Model::kOffCcm) inst = prepare_online(std::move(inst), model, a.rate_cap, a.no_split);

  LinearProgram lp;
  switch (model) {
    case Model::kOffCcm: lp = build_offline_lp(inst).lp; break;
    case Model::kOnCcm: lp = build_online_coverage_lp(inst).lp; break;
    case Model::kOnCsm: lp = build_config_lp(inst, a.max_vars).lp; break;
  }
  if (!a.dump_lp.empty()) write_text(a.dump_lp, dump_text(lp), out);
  const LpSolution sol = solve_max(lp);
  err << "status " << to_string(sol.status) << " after " << sol.iterations << " pivots\n";

  nlohmann::json j;
  j["version"] = 1;
  j["model"] = to_string(model);
  j["status"] = to_string(sol.status);
  j["objective"] = sol.objective;
  j["variables"] = nlohmann::json::array();
  for (int v = 0; v < lp.num_vars(); ++v) {
    j["variables"].push_back({{"name", lp.names[v]}, {"value", sol.values.empty() ? 0.0 : sol.values[v]}});
  }
  if (!a.output.empty()) write_text(a.output, j.dump(2) + "\n", out);

  std::ostringstream summary;
  summary.precision(12);
  summary << "objective " << sol.objective << "\n";
  for (int v = 0; v < lp.num_vars() && !sol.values.empty(); ++v) {
    if (sol.values[v] != 0.0) summary << lp.names[v] << " " << sol.values[v] << "\n";
  }
  out << summary.str();
  return sol.status == LpStatus::kOptimal ? kExitOk : kExitFailure;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  if (!a.seed) {
    err << "simulate: --seed is required\n";
    return kExitUsage;
  }
  if (a.trials < 2) {
    err << "simulate: --trials must be at least 2\n";
    return kExitUsage;
  }
  ReportConfig cfg;
  cfg.model = model_from_string(a.model);
  cfg.policies = a.policies;
  cfg.trials = a.trials;
  cfg.seed = *a.seed;
  cfg.threads = a.threads;
  cfg.opt = opt_mode_from_string(a.opt);
  cfg.opt_trials = a.opt_trials;
  cfg.instance_id = a.instance_id.empty() ? a.instance : a.instance_id;
  cfg.greedy_take_zero_gain = !a.greedy_skip_zero;
  cfg.config_max_vars = a.max_vars;

  Instance inst = load_json(a.instance);
  if (cfg.model != Model::kOffCcm) {
    inst = prepare_online(std::move(inst), cfg.model, a.rate_cap, a.no_split);
  }
  const RatioReport report = competitive_ratio_report(inst, cfg);
  write_text(a.csv, report_csv(report), out);
  if (!a.json.empty()) write_text(a.json, report_json(report), out);
  return kExitOk;
}

int cmd_analysis(const AnalysisArgs& a, std::ostream& out, std::ostream& err) {
  AnalysisOptions opt;
  opt.mc_trials = a.trials;
  opt.seed = a.seed;
  opt.threads = a.threads;
  const AnalysisReport rep = run_analysis(opt);
  for (const AnalysisCheck& c : rep.checks) {
    if (!c.pass) err << "bound violated: " << c.name << " (" << c.value << " vs " << c.bound << ")\n";
  }
  write_text(a.output, analysis_json(rep), out);
  return rep.all_pass() ? kExitOk : kExitBoundViolation;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Capacitated coverage and submodular assignment: LPs, rounding, simulation"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate an instance as JSON");
  g->add_flag("--star", gen.star, "Star-graph worst case for greedy");
  g->add_flag("--random", gen.random, "Random bipartite instance");
  g->add_option("--n", gen.n, "Star size")->check(CLI::Range(2, 1000000));
  g->add_option("--eps", gen.eps, "Star minor-feature weight")->check(CLI::Range(0.0, 1.0));
  g->add_option("--tasks", gen.params.num_tasks)->check(CLI::PositiveNumber);
  g->add_option("--workers", gen.params.num_workers)->check(CLI::PositiveNumber);
  g->add_option("--features", gen.params.num_features)->check(CLI::PositiveNumber);
  g->add_option("--edge-prob", gen.params.edge_prob)->check(CLI::Range(0.0, 1.0));
  g->add_option("--feature-prob", gen.params.feature_prob)->check(CLI::Range(0.0, 1.0));
  g->add_option("--task-cap-min", gen.params.task_capacity_min)->check(CLI::PositiveNumber);
  g->add_option("--task-cap-max", gen.params.task_capacity_max)->check(CLI::PositiveNumber);
  g->add_option("--worker-cap-min", gen.params.worker_capacity_min)->check(CLI::PositiveNumber);
  g->add_option("--worker-cap-max", gen.params.worker_capacity_max)->check(CLI::PositiveNumber);
  g->add_option("--utility", gen.utility, "coverage | sqrt_diversity | oracle");
  g->add_option("--horizon", gen.params.horizon, "T; 0 for an offline instance")
      ->check(CLI::NonNegativeNumber);
  g->add_option("--seed", gen.seed);
  g->add_option("-o,--output", gen.output, "Output file (stdout if omitted)");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve the benchmark LP of a model");
  s->add_option("--model", solve.model, "off-ccm | on-ccm | on-csm")->required();
  s->add_option("instance", solve.instance)->required();
  s->add_option("-o,--output", solve.output, "Solution JSON");
  s->add_option("--dump-lp", solve.dump_lp, "Write the LP in text form");
  s->add_option("--max-vars", solve.max_vars, "Configuration LP column limit");
  s->add_option("--rate-cap", solve.rate_cap, "on-csm: split worker types above this rate")
      ->check(CLI::PositiveNumber);
  s->add_flag("--no-split", solve.no_split, "on-csm: keep high-rate types whole");

  SimulateArgs sim;
  auto* m = app.add_subcommand("simulate", "Estimate policy performance and ratios");
  m->add_option("--model", sim.model, "off-ccm | on-ccm | on-csm")->required();
  m->add_option("instance", sim.instance)->required();
  m->add_option("--policies", sim.policies, "alg1, alg2, alg3, greedy")
      ->delimiter(',')
      ->required();
  m->add_option("--trials", sim.trials);
  m->add_option("--seed", sim.seed);
  m->add_option("--threads", sim.threads)->check(CLI::PositiveNumber);
  m->add_option("--opt", sim.opt, "none | exact | mc");
  m->add_option("--opt-trials", sim.opt_trials, "Monte Carlo oracle trials");
  m->add_option("--csv", sim.csv, "CSV report (stdout if omitted)");
  m->add_option("--json", sim.json, "JSON report");
  m->add_option("--instance-id", sim.instance_id);
  m->add_flag("--greedy-skip-zero", sim.greedy_skip_zero, "Greedy ignores zero-gain edges");
  m->add_option("--max-vars", sim.max_vars, "Configuration LP column limit");
  m->add_option("--rate-cap", sim.rate_cap)->check(CLI::PositiveNumber);
  m->add_flag("--no-split", sim.no_split);

  AnalysisArgs ana;
  auto* an = app.add_subcommand("analysis", "Evaluate the proof constants and cross-checks");
  an->add_option("--trials", ana.trials, "Monte Carlo trials per check")->check(CLI::PositiveNumber);
  an->add_option("--seed", ana.seed);
  an->add_option("--threads", ana.threads)->check(CLI::PositiveNumber);
  an->add_option("-o,--output", ana.output, "Report JSON (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_gen(gen, out, err);
    if (s->parsed()) return cmd_solve(solve, out, err);
    if (m->parsed()) return cmd_simulate(sim, out, err);
    if (an->parsed()) return cmd_analysis(ana, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace capcov
