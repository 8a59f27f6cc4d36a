#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "aamec/optimizer.hpp"
#include "aamec/topology.hpp"

// Static-vs-dynamic comparisons and MEC-deployment-ratio sweeps over
// snapshot series, with metric aggregation and deterministic report writers.

namespace aamec::exp {

struct SolveOptions {
  opt::SolveLimits limits;
  int jobs = 1;  // >1 solves independent snapshots concurrently
};

struct SnapshotOutcome {
  int index = 0;
  double time_s = 0.0;
  opt::SolveStatus status = opt::SolveStatus::Optimal;
  double objective_s = 0.0;       // over routed commodities
  std::uint64_t nodes_explored = 0;
  int total_commodities = 0;
  int solved = 0;
  int dropped = 0;
  double bandwidth_bps = 0.0;  // sum over used arcs of commodity demand
  double wall_time_s = 0.0;    // never written to reports
};

struct FlowRecord {
  int snapshot = 0;
  std::uint32_t commodity = 0;
  std::string label;       // service name or lambda tag
  opt::NodeId source = 0;
  opt::NodeId destination = 0;
  std::string dest_kind;   // "gateway" or "aerial"
  std::string dest_name;
  double latency_s = 0.0;
  double demand_bps = 0.0;
  int hops = 0;
};

struct DropRecord {
  int snapshot = 0;
  std::uint32_t commodity = 0;
  std::string label;
  std::string reason;  // "unreachable" or "infeasible"
};

struct RunResult {
  opt::UseCase use_case = opt::UseCase::Airborne;
  std::string mode;  // "dynamic" or "static"
  double mec_ratio = 0.0;
  std::vector<SnapshotOutcome> snapshots;  // one per snapshot, in order
  std::vector<FlowRecord> flows;           // snapshot-major, commodity order
  std::vector<DropRecord> drops;
};

// Percentiles use the nearest-rank rule on the sorted sample.
struct LatencySummary {
  std::uint64_t count = 0;
  double mean_s = 0.0;
  double median_s = 0.0;
  double p5_s = 0.0;
  double p95_s = 0.0;
};

struct Metrics {
  std::uint64_t total_commodities = 0;
  std::uint64_t solved = 0;
  std::uint64_t dropped = 0;
  LatencySummary overall;
  std::vector<std::pair<std::string, LatencySummary>> per_label;  // sorted
  double gateway_share = 0.0;  // of solved commodities, by destination class
  double aerial_share = 0.0;
  std::vector<std::pair<std::string, double>> location_shares;  // sorted
  double total_bandwidth_bps = 0.0;  // summed over snapshots
  double mean_objective_s = 0.0;     // over feasible snapshots
};

// Destinations re-optimized at every snapshot.
RunResult run_dynamic(const topo::Scenario& scenario, opt::UseCase use_case,
                      const SolveOptions& options = {});

// Destinations fixed at each commodity's first appearance (snapshot 0 for
// commodities present from the start); later snapshots re-solve routing
// only. Commodities whose fixed destination is unreachable are dropped for
// that snapshot with reason "unreachable".
RunResult run_static(const topo::Scenario& scenario, opt::UseCase use_case,
                     const SolveOptions& options = {});

struct SweepEntry {
  double ratio = 0.0;
  RunResult result;
  Metrics metrics;
};

// One dynamic run per ratio under the scenario seed; nested ratios yield
// nested aerial MEC sets (prefixes of one seeded permutation).
std::vector<SweepEntry> sweep_mec_ratio(const topo::Scenario& scenario,
                                        const std::vector<double>& ratios,
                                        opt::UseCase use_case,
                                        const SolveOptions& options = {});

Metrics aggregate_metrics(const RunResult& result);

// (base - other) / base, in percent; 0 when base is 0.
double improvement_pct(double base, double other);

// Report writers; all output is byte-deterministic for a fixed RunResult.
void write_metrics_csv(std::ostream& os, const RunResult& result);
void write_flows_csv(std::ostream& os, const RunResult& result);
void write_summary_json(
    std::ostream& os,
    const std::vector<std::pair<std::string, Metrics>>& named_metrics);
void write_latency_series(std::ostream& os, const RunResult& result);

}  // namespace aamec::exp
