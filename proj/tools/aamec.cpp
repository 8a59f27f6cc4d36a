// Command-line entry point: experiment runs, artifact validation and
// snapshot/instance dumps.
//
// Exit codes: 0 success; 1 usage/config/file error; 2 infeasible or
// budget-exceeded results (partial outputs written); 3 validation failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aamec/config.hpp"
#include "aamec/experiments.hpp"
#include "aamec/optimizer.hpp"
#include "aamec/topology.hpp"

namespace fs = std::filesystem;
using namespace aamec;

namespace {

struct RunArgs {
  std::string scenario_path;
  std::string mode = "dynamic";
  std::vector<double> ratios;
  std::string out_dir;
  std::int64_t seed = -1;
  int jobs = 1;
  std::uint64_t node_budget = 0;
  double time_budget_s = 0.0;
};

std::string default_out_dir() {
  if (const char* env = std::getenv("AAMEC_OUT")) return env;
  return "out";
}

void add_run_flags(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("--scenario", args.scenario_path, "Scenario config (JSON)")
      ->required();
  cmd->add_option("--mode", args.mode, "dynamic, static or both")
      ->check(CLI::IsMember({"dynamic", "static", "both"}));
  cmd->add_option("--ratios", args.ratios,
                  "MEC deployment ratios; runs a dynamic sweep")
      ->delimiter(',');
  cmd->add_option("--out", args.out_dir, "Output directory (default: $AAMEC_OUT or ./out)");
  cmd->add_option("--seed", args.seed, "Override the scenario seed");
  cmd->add_option("--jobs", args.jobs, "Concurrent snapshot solves")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--node-budget", args.node_budget,
                  "Solver search-node budget");
  cmd->add_option("--time-budget", args.time_budget_s,
                  "Solver time budget per snapshot, seconds");
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << contents;
}

void emit_run(const fs::path& dir, const std::string& prefix,
              const exp::RunResult& run) {
  std::ostringstream metrics, flows, series;
  exp::write_metrics_csv(metrics, run);
  exp::write_flows_csv(flows, run);
  exp::write_latency_series(series, run);
  write_file(dir / (prefix + "_metrics.csv"), metrics.str());
  write_file(dir / (prefix + "_flows.csv"), flows.str());
  write_file(dir / (prefix + "_series.txt"), series.str());
}

bool run_clean(const exp::RunResult& run) {
  for (const auto& s : run.snapshots)
    if (s.status != opt::SolveStatus::Optimal) return false;
  return true;
}

int cmd_run(const RunArgs& args, opt::UseCase use_case) {
  cfg::RunConfig config = cfg::parse_config_file(args.scenario_path);
  if (args.seed >= 0)
    config.scenario.rng_seed = static_cast<std::uint64_t>(args.seed);
  if (args.node_budget > 0) config.limits.node_budget = args.node_budget;
  if (args.time_budget_s > 0.0) config.limits.time_budget_s = args.time_budget_s;

  const fs::path dir =
      args.out_dir.empty() ? fs::path(default_out_dir()) : fs::path(args.out_dir);
  fs::create_directories(dir);
  {
    std::ostringstream resolved;
    cfg::write_resolved(resolved, config);
    write_file(dir / "resolved_config.json", resolved.str());
  }

  const std::string prefix =
      use_case == opt::UseCase::Airborne ? "airborne" : "offload";
  const exp::SolveOptions options{config.limits, args.jobs};
  bool clean = true;

  if (!args.ratios.empty()) {
    const auto sweep = exp::sweep_mec_ratio(config.scenario, args.ratios,
                                            use_case, options);
    std::vector<std::pair<std::string, exp::Metrics>> named;
    bool monotone = true;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      const auto& e = sweep[i];
      char tag[32];
      std::snprintf(tag, sizeof(tag), "%s_ratio_%.2f", prefix.c_str(),
                    e.ratio);
      emit_run(dir, tag, e.result);
      named.emplace_back(tag, e.metrics);
      clean = clean && run_clean(e.result);
      if (i > 0 && sweep[i - 1].ratio <= e.ratio) {
        for (std::size_t s = 0; s < e.result.snapshots.size(); ++s) {
          if (e.result.snapshots[s].objective_s >
              sweep[i - 1].result.snapshots[s].objective_s + 1e-9)
            monotone = false;
        }
      }
    }
    std::ostringstream summary;
    exp::write_summary_json(summary, named);
    write_file(dir / (prefix + "_sweep_summary.json"), summary.str());
    std::cout << "sweep: " << sweep.size() << " ratios, objectives "
              << (monotone ? "non-increasing" : "NOT monotone") << "\n";
    return clean ? 0 : 2;
  }

  std::vector<std::pair<std::string, exp::Metrics>> named;
  exp::Metrics dyn_m, sta_m;
  if (args.mode == "dynamic" || args.mode == "both") {
    const auto run = exp::run_dynamic(config.scenario, use_case, options);
    dyn_m = exp::aggregate_metrics(run);
    emit_run(dir, prefix + "_dynamic", run);
    named.emplace_back("dynamic", dyn_m);
    clean = clean && run_clean(run);
  }
  if (args.mode == "static" || args.mode == "both") {
    const auto run = exp::run_static(config.scenario, use_case, options);
    sta_m = exp::aggregate_metrics(run);
    emit_run(dir, prefix + "_static", run);
    named.emplace_back("static", sta_m);
    clean = clean && run_clean(run);
  }
  std::ostringstream summary;
  exp::write_summary_json(summary, named);
  write_file(dir / (prefix + "_summary.json"), summary.str());

  if (args.mode == "both") {
    const double imp =
        exp::improvement_pct(sta_m.overall.mean_s, dyn_m.overall.mean_s);
    std::cout << "mean-latency improvement dynamic vs static: " << imp
              << "%\n";
  }
  std::cout << "outputs written to " << dir.string() << "\n";
  return clean ? 0 : 2;
}

int cmd_validate(const std::string& instance_path,
                 const std::string& solution_path) {
  std::ifstream is(instance_path);
  std::ifstream ss(solution_path);
  if (!is) {
    std::cerr << "cannot open instance file: " << instance_path << "\n";
    return 1;
  }
  if (!ss) {
    std::cerr << "cannot open solution file: " << solution_path << "\n";
    return 1;
  }
  opt::ProblemInstance problem;
  opt::Solution solution;
  std::string solution_instance_id;
  try {
    problem = opt::read_instance(is);
    std::tie(solution, solution_instance_id) = opt::read_solution(ss);
  } catch (const std::exception& e) {
    std::cerr << "malformed artifact: " << e.what() << "\n";
    return 1;
  }
  if (solution_instance_id != problem.content_id()) {
    std::cerr << "instance/solution id mismatch: " << problem.content_id()
              << " vs " << solution_instance_id << "\n";
    return 1;
  }
  const auto report = opt::validate_solution(problem, solution);
  for (const auto& c : report.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
  }
  return report.feasible ? 0 : 3;
}

int cmd_snapshot(const std::string& scenario_path, int index) {
  const auto config = cfg::parse_config_file(scenario_path);
  if (index < 0 || index >= config.scenario.snapshot_count()) {
    std::cerr << "snapshot index out of range [0, "
              << config.scenario.snapshot_count() - 1 << "]\n";
    return 1;
  }
  const auto snap = topo::build_snapshot(config.scenario, index);
  topo::write_snapshot(std::cout, config.scenario, snap);
  return 0;
}

int cmd_solve(const std::string& scenario_path, const std::string& use_case,
              int index, const std::string& out_instance,
              const std::string& out_solution) {
  const auto config = cfg::parse_config_file(scenario_path);
  if (index < 0 || index >= config.scenario.snapshot_count()) {
    std::cerr << "snapshot index out of range\n";
    return 1;
  }
  const auto uc = use_case == "airborne" ? opt::UseCase::Airborne
                                         : opt::UseCase::Offload;
  const topo::Scenario& sc = config.scenario;
  const auto metas = [&sc] {
    const auto infos = sc.nodes();
    const auto mec = topo::assign_mec_aircraft(sc);
    std::vector<opt::NodeMeta> m;
    for (const auto& n : infos) {
      const bool aerial_mec =
          n.cls == topo::NodeClass::Aircraft &&
          std::binary_search(mec.begin(), mec.end(), n.id);
      m.push_back({n.id, n.cls,
                   n.cls == topo::NodeClass::Gateway || aerial_mec, n.name});
    }
    return m;
  }();
  const auto snap = topo::build_snapshot(sc, index);
  opt::ProblemInstance problem;
  if (uc == opt::UseCase::Airborne) {
    std::vector<demand::AircraftDemand> aircraft;
    for (const auto& n : sc.nodes())
      if (n.cls == topo::NodeClass::Aircraft && snap.positions[n.id])
        aircraft.push_back({n.id, n.passengers});
    const auto flows = demand::build_flows(aircraft, sc.services,
                                           sc.passenger_service_ratio);
    problem = opt::build_airborne_problem(metas, snap, flows);
  } else {
    std::vector<demand::SatTaskLoad> loads;
    const double cap = sc.satellite_processor.task_capacity(sc.task_model);
    for (const auto& m : metas) {
      if (m.cls != topo::NodeClass::Satellite) continue;
      const auto arrivals = demand::sample_task_arrivals(
          sc.task_lambda, sc.rng_seed, m.id,
          static_cast<std::uint64_t>(index));
      loads.push_back(demand::offload_load(m.id, sc.task_lambda, arrivals,
                                           cap, sc.task_model));
    }
    problem = opt::build_offload_problem(metas, snap, loads,
                                         sc.mec_processor, sc.task_model);
  }
  const auto solution = opt::solve_exact(problem, config.limits);
  {
    std::ofstream os(out_instance, std::ios::binary);
    opt::write_instance(os, problem);
  }
  {
    std::ofstream os(out_solution, std::ios::binary);
    opt::write_solution(os, problem, solution);
  }
  std::cout << "status: "
            << (solution.status == opt::SolveStatus::Optimal ? "optimal"
                : solution.status == opt::SolveStatus::Infeasible
                    ? "infeasible"
                    : "budget-exceeded")
            << ", objective " << solution.objective_s << " s\n";
  return solution.status == opt::SolveStatus::Optimal ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aerial-aided MEC simulator and exact optimizer"};
  app.require_subcommand(1);

  RunArgs air_args, off_args;
  auto* air = app.add_subcommand("airborne",
                                 "Route in-flight service flows to MEC nodes");
  add_run_flags(air, air_args);
  auto* off = app.add_subcommand("offload",
                                 "Offload satellite task surplus to MEC nodes");
  add_run_flags(off, off_args);

  std::string instance_path, solution_path;
  auto* val = app.add_subcommand("validate",
                                 "Check a dumped instance/solution pair");
  val->add_option("--instance", instance_path)->required();
  val->add_option("--solution", solution_path)->required();

  std::string snap_scenario;
  int snap_index = 0;
  auto* snap = app.add_subcommand("snapshot", "Dump one topology snapshot");
  snap->add_option("--scenario", snap_scenario)->required();
  snap->add_option("--index", snap_index);

  std::string solve_scenario, solve_uc = "airborne";
  std::string out_instance = "instance.json", out_solution = "solution.json";
  int solve_index = 0;
  auto* solve = app.add_subcommand(
      "solve", "Solve one snapshot and dump the instance/solution pair");
  solve->add_option("--scenario", solve_scenario)->required();
  solve->add_option("--use-case", solve_uc)
      ->check(CLI::IsMember({"airborne", "offload"}));
  solve->add_option("--snapshot", solve_index);
  solve->add_option("--out-instance", out_instance);
  solve->add_option("--out-solution", out_solution);

  try {
    app.parse(argc, argv);
    if (app.got_subcommand(air)) return cmd_run(air_args, opt::UseCase::Airborne);
    if (app.got_subcommand(off)) return cmd_run(off_args, opt::UseCase::Offload);
    if (app.got_subcommand(val)) return cmd_validate(instance_path, solution_path);
    if (app.got_subcommand(snap)) return cmd_snapshot(snap_scenario, snap_index);
    if (app.got_subcommand(solve))
      return cmd_solve(solve_scenario, solve_uc, solve_index, out_instance,
                       out_solution);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const cfg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
