#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "aamec/demand.hpp"
#include "aamec/topology.hpp"

// Latency-minimization instances for the two use cases, an exact
// branch-and-bound solver, a brute-force oracle and an independent
// constraint validator.

namespace aamec::opt {

using topo::NodeId;

enum class UseCase { Airborne, Offload };

struct NodeMeta {
  NodeId id = 0;  // must equal its index in ProblemInstance::nodes
  topo::NodeClass cls = topo::NodeClass::Satellite;
  bool has_mec = false;
  std::string name;
};

// Directed arc; each physical link contributes one arc per direction, each
// with the full link capacity.
struct Arc {
  NodeId from = 0;
  NodeId to = 0;
  topo::LinkType type = topo::LinkType::SatSat;
  double distance_m = 0.0;
  double capacity_bps = 0.0;
};

struct Candidate {
  NodeId node = 0;
  double compute_latency_s = 0.0;  // L^MEC at this destination
};

struct Commodity {
  std::uint32_t id = 0;
  NodeId source = 0;
  std::string label;            // service name or lambda tag, for reporting
  double demand_bps = 0.0;      // capacity consumed on every used arc
  double obj_bits = 0.0;        // transmission numerator in the objective
  double delay_bits = 0.0;      // transmission numerator in the delay bound
  double delay_bound_s = 0.0;   // tau
  std::vector<Candidate> candidates;  // sorted by node id
};

struct ProblemInstance {
  UseCase use_case = UseCase::Airborne;
  int snapshot_index = 0;
  double time_s = 0.0;
  std::vector<NodeMeta> nodes;
  std::vector<Arc> arcs;  // sorted by (from, to)
  std::vector<Commodity> commodities;

  // Objective transmission + round-trip propagation over one arc.
  double objective_weight(const Commodity& c, const Arc& a) const;
  // Delay-bound transmission + round-trip propagation over one arc.
  double delay_weight(const Commodity& c, const Arc& a) const;

  // Content hash, used to pair dumped instances with dumped solutions.
  std::string content_id() const;
};

enum class SolveStatus { Optimal, Infeasible, BudgetExceeded };

struct CommodityRoute {
  std::uint32_t commodity = 0;
  NodeId destination = 0;
  std::vector<NodeId> path;  // source..destination; single node when self-served
  double transmission_s = 0.0;
  double propagation_s = 0.0;
  double compute_s = 0.0;
  double latency_s = 0.0;  // objective contribution
};

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  double objective_s = 0.0;
  std::vector<CommodityRoute> routes;  // one per commodity when feasible
  std::vector<std::pair<NodeId, NodeId>> gateway_matching;  // (sat, gw)
  double optimality_gap_s = 0.0;  // only meaningful for BudgetExceeded
  std::uint64_t nodes_explored = 0;
};

struct SolveLimits {
  std::uint64_t node_budget = 50'000'000;
  double time_budget_s = 600.0;
  bool require_optimal = true;
};

// Instance builders. `mec_aircraft` lists aircraft sampled to carry a MEC
// server; gateways are MEC-capable in every configuration.
ProblemInstance build_airborne_problem(const std::vector<NodeMeta>& nodes,
                                       const topo::Snapshot& snapshot,
                                       const std::vector<demand::Flow>& flows);

ProblemInstance build_offload_problem(
    const std::vector<NodeMeta>& nodes, const topo::Snapshot& snapshot,
    const std::vector<demand::SatTaskLoad>& loads,
    const demand::ProcessorSpec& mec_processor, const demand::TaskModel& tm);

// Restrict each commodity's candidate set to the given destinations (used by
// the static experiment mode). Commodities whose fixed destination is not a
// node of the instance keep an empty candidate set.
void restrict_candidates(ProblemInstance& problem,
                         const std::vector<std::pair<std::uint32_t, NodeId>>&
                             fixed_destinations);

Solution solve_exact(const ProblemInstance& problem,
                     const SolveLimits& limits = {});

// Exhaustive enumeration over destination assignments and simple paths.
// Throws OracleTooLarge when the enumeration bound (1e6 combinations) is
// exceeded.
struct OracleTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
Solution solve_oracle(const ProblemInstance& problem);

Solution greedy_heuristic(const ProblemInstance& problem);

struct ConstraintCheck {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<ConstraintCheck> checks;
  bool feasible = true;
};

// Recomputes every constraint from the instance's raw arcs and commodities;
// does not reuse any solver state.
ValidationReport validate_solution(const ProblemInstance& problem,
                                   const Solution& solution);

// JSON dumps for cross-checking with external tools.
void write_instance(std::ostream& os, const ProblemInstance& problem);
ProblemInstance read_instance(std::istream& is);
void write_solution(std::ostream& os, const ProblemInstance& problem,
                    const Solution& solution);
// Returns the solution plus the instance id recorded in the file.
std::pair<Solution, std::string> read_solution(std::istream& is);

}  // namespace aamec::opt
