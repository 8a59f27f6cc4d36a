#include "aamec/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

#include "aamec/demand.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aamec::exp {

namespace {

// A commodity keeps its identity across snapshots through (source, label):
// airborne flows are one service per aircraft, offload loads one per
// satellite.
using StickyKey = std::pair<opt::NodeId, std::string>;

std::vector<opt::NodeMeta> make_metas(const topo::Scenario& scenario,
                                      double mec_ratio) {
  const auto infos = scenario.nodes();
  const auto mec = topo::assign_mec_aircraft(scenario, mec_ratio);
  std::vector<opt::NodeMeta> metas;
  metas.reserve(infos.size());
  for (const auto& n : infos) {
    opt::NodeMeta m;
    m.id = n.id;
    m.cls = n.cls;
    m.name = n.name;
    m.has_mec = n.cls == topo::NodeClass::Gateway ||
                (n.cls == topo::NodeClass::Aircraft &&
                 std::binary_search(mec.begin(), mec.end(), n.id));
    metas.push_back(m);
  }
  return metas;
}

// Stable-id flows over every aircraft; absent aircraft filtered per
// snapshot before problem construction.
std::vector<demand::Flow> all_flows(const topo::Scenario& scenario) {
  std::vector<demand::AircraftDemand> aircraft;
  for (const auto& n : scenario.nodes())
    if (n.cls == topo::NodeClass::Aircraft)
      aircraft.push_back({n.id, n.passengers});
  return demand::build_flows(aircraft, scenario.services,
                             scenario.passenger_service_ratio);
}

opt::ProblemInstance build_problem(const topo::Scenario& scenario,
                                   const std::vector<opt::NodeMeta>& metas,
                                   const topo::Snapshot& snapshot,
                                   opt::UseCase use_case,
                                   const std::vector<demand::Flow>& flows) {
  if (use_case == opt::UseCase::Airborne) {
    std::vector<demand::Flow> present;
    for (const auto& f : flows)
      if (snapshot.positions[f.source]) present.push_back(f);
    return opt::build_airborne_problem(metas, snapshot, present);
  }
  std::vector<demand::SatTaskLoad> loads;
  const double cap =
      scenario.satellite_processor.task_capacity(scenario.task_model);
  for (const auto& m : metas) {
    if (m.cls != topo::NodeClass::Satellite) continue;
    const auto arrivals = demand::sample_task_arrivals(
        scenario.task_lambda, scenario.rng_seed, m.id,
        static_cast<std::uint64_t>(snapshot.index));
    loads.push_back(demand::offload_load(m.id, scenario.task_lambda, arrivals,
                                         cap, scenario.task_model));
  }
  return opt::build_offload_problem(metas, snapshot, loads,
                                    scenario.mec_processor,
                                    scenario.task_model);
}

// Can the commodity be routed at all, ignoring the other commodities?
bool feasible_alone(const opt::ProblemInstance& problem,
                    const opt::Commodity& c) {
  opt::ProblemInstance single;
  single.use_case = problem.use_case;
  single.nodes = problem.nodes;
  single.arcs = problem.arcs;
  single.commodities = {c};
  return opt::greedy_heuristic(single).status == opt::SolveStatus::Optimal;
}

struct SnapSolve {
  SnapshotOutcome outcome;
  std::vector<FlowRecord> flows;
  std::vector<DropRecord> drops;
  std::vector<std::pair<StickyKey, opt::NodeId>> chosen;  // key -> destination
};

SnapSolve solve_snapshot(const topo::Scenario& scenario,
                         const std::vector<opt::NodeMeta>& metas,
                         const topo::Snapshot& snapshot,
                         opt::UseCase use_case,
                         const std::vector<demand::Flow>& flows,
                         const opt::SolveLimits& limits,
                         const std::map<StickyKey, opt::NodeId>* fixed) {
  SnapSolve out;
  out.outcome.index = snapshot.index;
  out.outcome.time_s = snapshot.time_s;

  auto problem = build_problem(scenario, metas, snapshot, use_case, flows);
  out.outcome.total_commodities = static_cast<int>(problem.commodities.size());

  if (fixed) {
    std::vector<std::pair<std::uint32_t, opt::NodeId>> restrictions;
    for (const auto& c : problem.commodities) {
      const auto it = fixed->find({c.source, c.label});
      if (it != fixed->end()) restrictions.emplace_back(c.id, it->second);
    }
    opt::restrict_candidates(problem, restrictions);
  }

  // Commodities unroutable even in isolation are dropped up front so one
  // disconnected source does not make the whole snapshot infeasible.
  std::vector<opt::Commodity> routable;
  for (const auto& c : problem.commodities) {
    if (c.candidates.empty() || !feasible_alone(problem, c)) {
      out.drops.push_back({snapshot.index, c.id, c.label, "unreachable"});
    } else {
      routable.push_back(c);
    }
  }
  problem.commodities = std::move(routable);

  const auto t0 = std::chrono::steady_clock::now();
  const auto solution = opt::solve_exact(problem, limits);
  out.outcome.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  out.outcome.status = solution.status;
  out.outcome.nodes_explored = solution.nodes_explored;

  if (solution.status == opt::SolveStatus::Infeasible) {
    for (const auto& c : problem.commodities)
      out.drops.push_back({snapshot.index, c.id, c.label, "infeasible"});
    out.outcome.dropped = static_cast<int>(out.drops.size());
    return out;
  }

  out.outcome.objective_s = solution.objective_s;
  for (const auto& r : solution.routes) {
    const opt::Commodity* c = nullptr;
    for (const auto& cc : problem.commodities)
      if (cc.id == r.commodity) c = &cc;
    const auto& dest = metas[r.destination];
    FlowRecord rec;
    rec.snapshot = snapshot.index;
    rec.commodity = r.commodity;
    rec.label = c->label;
    rec.source = c->source;
    rec.destination = r.destination;
    rec.dest_kind =
        dest.cls == topo::NodeClass::Gateway ? "gateway" : "aerial";
    rec.dest_name = dest.name;
    rec.latency_s = r.latency_s;
    rec.demand_bps = c->demand_bps;
    rec.hops = static_cast<int>(r.path.size()) - 1;
    out.outcome.bandwidth_bps += c->demand_bps * rec.hops;
    out.flows.push_back(rec);
    out.chosen.push_back({{c->source, c->label}, r.destination});
  }
  out.outcome.solved = static_cast<int>(solution.routes.size());
  out.outcome.dropped = static_cast<int>(out.drops.size());
  return out;
}

RunResult assemble(opt::UseCase use_case, std::string mode, double ratio,
                   std::vector<SnapSolve>& parts) {
  RunResult run;
  run.use_case = use_case;
  run.mode = std::move(mode);
  run.mec_ratio = ratio;
  for (auto& p : parts) {
    run.snapshots.push_back(p.outcome);
    run.flows.insert(run.flows.end(), p.flows.begin(), p.flows.end());
    run.drops.insert(run.drops.end(), p.drops.begin(), p.drops.end());
  }
  return run;
}

}  // namespace

RunResult run_dynamic(const topo::Scenario& scenario, opt::UseCase use_case,
                      const SolveOptions& options) {
  const auto metas = make_metas(scenario, scenario.mec_aircraft_ratio);
  const auto flows =
      use_case == opt::UseCase::Airborne ? all_flows(scenario)
                                         : std::vector<demand::Flow>{};
  const auto snapshots = topo::snapshot_series(scenario, options.jobs);
  std::vector<SnapSolve> parts(snapshots.size());

#ifdef _OPENMP
  if (options.jobs > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(options.jobs)
    for (int i = 0; i < static_cast<int>(snapshots.size()); ++i) {
      parts[i] = solve_snapshot(scenario, metas, snapshots[i], use_case,
                                flows, options.limits, nullptr);
    }
    return assemble(use_case, "dynamic", scenario.mec_aircraft_ratio, parts);
  }
#endif
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    parts[i] = solve_snapshot(scenario, metas, snapshots[i], use_case, flows,
                              options.limits, nullptr);
  }
  return assemble(use_case, "dynamic", scenario.mec_aircraft_ratio, parts);
}

RunResult run_static(const topo::Scenario& scenario, opt::UseCase use_case,
                     const SolveOptions& options) {
  const auto metas = make_metas(scenario, scenario.mec_aircraft_ratio);
  const auto flows =
      use_case == opt::UseCase::Airborne ? all_flows(scenario)
                                         : std::vector<demand::Flow>{};
  const auto snapshots = topo::snapshot_series(scenario, options.jobs);
  std::vector<SnapSolve> parts(snapshots.size());

  // Destinations stick from each commodity's first appearance, so every
  // snapshot depends on its predecessors and runs sequentially.
  std::map<StickyKey, opt::NodeId> fixed;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    parts[i] = solve_snapshot(scenario, metas, snapshots[i], use_case, flows,
                              options.limits, &fixed);
    for (const auto& [key, dest] : parts[i].chosen) fixed.emplace(key, dest);
  }
  return assemble(use_case, "static", scenario.mec_aircraft_ratio, parts);
}

std::vector<SweepEntry> sweep_mec_ratio(const topo::Scenario& scenario,
                                        const std::vector<double>& ratios,
                                        opt::UseCase use_case,
                                        const SolveOptions& options) {
  std::vector<SweepEntry> entries;
  for (const double r : ratios) {
    topo::Scenario s = scenario;
    s.mec_aircraft_ratio = r;
    SweepEntry e;
    e.ratio = r;
    e.result = run_dynamic(s, use_case, options);
    e.metrics = aggregate_metrics(e.result);
    entries.push_back(std::move(e));
  }
  return entries;
}

namespace {

LatencySummary summarize(std::vector<double> values) {
  LatencySummary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean_s = sum / static_cast<double>(values.size());
  auto rank = [&values](double q) {
    const auto n = values.size();
    auto i = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    if (i > 0) --i;  // nearest rank, 1-based ceil(q*n)
    return values[std::min(i, n - 1)];
  };
  s.median_s = rank(0.50);
  s.p5_s = rank(0.05);
  s.p95_s = rank(0.95);
  return s;
}

}  // namespace

Metrics aggregate_metrics(const RunResult& result) {
  Metrics m;
  m.solved = result.flows.size();
  m.dropped = result.drops.size();
  m.total_commodities = m.solved + m.dropped;

  std::vector<double> overall;
  std::map<std::string, std::vector<double>> by_label;
  std::map<std::string, std::uint64_t> by_location;
  std::uint64_t gw = 0, air = 0;
  for (const auto& f : result.flows) {
    overall.push_back(f.latency_s);
    by_label[f.label].push_back(f.latency_s);
    ++by_location[f.dest_name];
    if (f.dest_kind == "gateway") ++gw; else ++air;
  }
  for (const auto& d : result.drops) by_label[d.label];  // keep the key

  m.overall = summarize(overall);
  for (auto& [label, values] : by_label)
    m.per_label.emplace_back(label, summarize(std::move(values)));
  if (m.solved > 0) {
    m.gateway_share = static_cast<double>(gw) / static_cast<double>(m.solved);
    m.aerial_share = static_cast<double>(air) / static_cast<double>(m.solved);
    for (const auto& [name, count] : by_location) {
      m.location_shares.emplace_back(
          name, static_cast<double>(count) / static_cast<double>(m.solved));
    }
  }

  int feasible_snapshots = 0;
  for (const auto& s : result.snapshots) {
    m.total_bandwidth_bps += s.bandwidth_bps;
    if (s.status != opt::SolveStatus::Infeasible) {
      m.mean_objective_s += s.objective_s;
      ++feasible_snapshots;
    }
  }
  if (feasible_snapshots > 0) m.mean_objective_s /= feasible_snapshots;
  return m;
}

double improvement_pct(double base, double other) {
  if (base == 0.0) return 0.0;
  return (base - other) / base * 100.0;
}

// ---------------------------------------------------------------------------
// Writers. All floating-point output goes through fixed-precision printf
// formatting so files are byte-identical across runs and job counts.

namespace {

std::string fmt(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

}  // namespace

void write_metrics_csv(std::ostream& os, const RunResult& result) {
  os << "snapshot,time_s,label,solved,dropped,mean_latency_s,bandwidth_bps\n";
  std::set<std::string> labels;
  for (const auto& f : result.flows) labels.insert(f.label);
  for (const auto& d : result.drops) labels.insert(d.label);
  for (const auto& snap : result.snapshots) {
    for (const auto& label : labels) {
      int solved = 0, dropped = 0;
      double latency = 0.0, bandwidth = 0.0;
      for (const auto& f : result.flows) {
        if (f.snapshot != snap.index || f.label != label) continue;
        ++solved;
        latency += f.latency_s;
        bandwidth += f.demand_bps * f.hops;
      }
      for (const auto& d : result.drops)
        if (d.snapshot == snap.index && d.label == label) ++dropped;
      if (solved == 0 && dropped == 0) continue;
      os << snap.index << ',' << fmt(snap.time_s, 3) << ',' << label << ','
         << solved << ',' << dropped << ','
         << fmt(solved > 0 ? latency / solved : 0.0, 9) << ','
         << fmt(bandwidth, 3) << '\n';
    }
  }
}

void write_flows_csv(std::ostream& os, const RunResult& result) {
  os << "snapshot,commodity,label,source,destination,dest_kind,dest_name,"
        "latency_s,demand_bps,hops\n";
  for (const auto& f : result.flows) {
    os << f.snapshot << ',' << f.commodity << ',' << f.label << ','
       << f.source << ',' << f.destination << ',' << f.dest_kind << ','
       << f.dest_name << ',' << fmt(f.latency_s, 9) << ','
       << fmt(f.demand_bps, 3) << ',' << f.hops << '\n';
  }
}

void write_summary_json(
    std::ostream& os,
    const std::vector<std::pair<std::string, Metrics>>& named_metrics) {
  nlohmann::ordered_json j;
  for (const auto& [name, m] : named_metrics) {
    nlohmann::ordered_json mj;
    mj["total_commodities"] = m.total_commodities;
    mj["solved"] = m.solved;
    mj["dropped"] = m.dropped;
    auto summary = [](const LatencySummary& s) {
      return nlohmann::ordered_json{{"count", s.count},
                                    {"mean_s", s.mean_s},
                                    {"median_s", s.median_s},
                                    {"p5_s", s.p5_s},
                                    {"p95_s", s.p95_s}};
    };
    mj["latency"] = summary(m.overall);
    for (const auto& [label, s] : m.per_label)
      mj["latency_by_label"][label] = summary(s);
    mj["gateway_share"] = m.gateway_share;
    mj["aerial_share"] = m.aerial_share;
    for (const auto& [name2, share] : m.location_shares)
      mj["location_shares"][name2] = share;
    mj["total_bandwidth_bps"] = m.total_bandwidth_bps;
    mj["mean_objective_s"] = m.mean_objective_s;
    j[name] = mj;
  }
  os << j.dump(2) << "\n";
}

void write_latency_series(std::ostream& os, const RunResult& result) {
  os << "# snapshot time_s objective_s mean_latency_s solved dropped\n";
  for (const auto& snap : result.snapshots) {
    double latency = 0.0;
    int solved = 0;
    for (const auto& f : result.flows) {
      if (f.snapshot != snap.index) continue;
      ++solved;
      latency += f.latency_s;
    }
    os << snap.index << ' ' << fmt(snap.time_s, 3) << ' '
       << fmt(snap.objective_s, 9) << ' '
       << fmt(solved > 0 ? latency / solved : 0.0, 9) << ' ' << solved << ' '
       << snap.dropped << '\n';
  }
}

}  // namespace aamec::exp
