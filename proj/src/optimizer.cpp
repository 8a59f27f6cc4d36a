#include "aamec/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "aamec/geom.hpp"

namespace aamec::opt {

namespace {

constexpr double kTimeTol = 1e-12;       // latency comparison tolerance
constexpr double kCapacitySlack = 1e-6;  // relative slack on bandwidth
constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
constexpr double kInf = std::numeric_limits<double>::infinity();

// An arc a single commodity could ever use: its demand alone must fit.
bool arc_admissible(const Commodity& c, const Arc& a) {
  return c.demand_bps <= a.capacity_bps * (1.0 + kCapacitySlack);
}

bool is_sat_to_gw(const ProblemInstance& p, const Arc& a) {
  return p.nodes[a.from].cls == topo::NodeClass::Satellite &&
         p.nodes[a.to].cls == topo::NodeClass::Gateway;
}

// Routing order: descending capacity demand, ties by commodity id.
std::vector<int> routing_order(const ProblemInstance& p) {
  std::vector<int> order(p.commodities.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&p](int x, int y) {
    const auto& a = p.commodities[x];
    const auto& b = p.commodities[y];
    if (a.demand_bps != b.demand_bps) return a.demand_bps > b.demand_bps;
    return a.id < b.id;
  });
  return order;
}

CommodityRoute make_route(const ProblemInstance& p, const Commodity& c,
                          const Candidate& cand,
                          const std::vector<NodeId>& path) {
  CommodityRoute r;
  r.commodity = c.id;
  r.destination = cand.node;
  r.path = path;
  r.compute_s = cand.compute_latency_s;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto it = std::find_if(
        p.arcs.begin(), p.arcs.end(), [&](const Arc& a) {
          return a.from == path[i] && a.to == path[i + 1];
        });
    r.transmission_s += c.obj_bits / it->capacity_bps;
    r.propagation_s += 2.0 * geom::propagation_latency(it->distance_m);
  }
  r.latency_s = r.transmission_s + r.propagation_s + r.compute_s;
  return r;
}

void finalize_solution(const ProblemInstance& p, Solution& s) {
  std::sort(s.routes.begin(), s.routes.end(),
            [](const CommodityRoute& a, const CommodityRoute& b) {
              return a.commodity < b.commodity;
            });
  s.gateway_matching.clear();
  for (const auto& r : s.routes) {
    for (std::size_t i = 0; i + 1 < r.path.size(); ++i) {
      const NodeId u = r.path[i], v = r.path[i + 1];
      if (p.nodes[u].cls == topo::NodeClass::Satellite &&
          p.nodes[v].cls == topo::NodeClass::Gateway) {
        const auto pair = std::make_pair(u, v);
        if (std::find(s.gateway_matching.begin(), s.gateway_matching.end(),
                      pair) == s.gateway_matching.end()) {
          s.gateway_matching.push_back(pair);
        }
      }
    }
  }
  std::sort(s.gateway_matching.begin(), s.gateway_matching.end());
}

}  // namespace

double ProblemInstance::objective_weight(const Commodity& c,
                                         const Arc& a) const {
  return c.obj_bits / a.capacity_bps +
         2.0 * geom::propagation_latency(a.distance_m);
}

double ProblemInstance::delay_weight(const Commodity& c, const Arc& a) const {
  return c.delay_bits / a.capacity_bps +
         2.0 * geom::propagation_latency(a.distance_m);
}

// ---------------------------------------------------------------------------
// Builders

namespace {

std::vector<Arc> arcs_from_snapshot(const topo::Snapshot& snapshot) {
  std::vector<Arc> arcs;
  arcs.reserve(snapshot.links.size() * 2);
  for (const auto& l : snapshot.links) {
    arcs.push_back({l.a, l.b, l.type, l.distance_m, l.capacity});
    arcs.push_back({l.b, l.a, l.type, l.distance_m, l.capacity});
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& x, const Arc& y) {
    return std::tie(x.from, x.to) < std::tie(y.from, y.to);
  });
  return arcs;
}

std::vector<Candidate> mec_candidates(const std::vector<NodeMeta>& nodes,
                                      const topo::Snapshot& snapshot) {
  std::vector<Candidate> cands;
  for (const auto& n : nodes) {
    if (!n.has_mec) continue;
    if (n.id < snapshot.positions.size() && !snapshot.positions[n.id])
      continue;  // not airborne at this snapshot
    cands.push_back({n.id, 0.0});
  }
  return cands;
}

}  // namespace

ProblemInstance build_airborne_problem(
    const std::vector<NodeMeta>& nodes, const topo::Snapshot& snapshot,
    const std::vector<demand::Flow>& flows) {
  ProblemInstance p;
  p.use_case = UseCase::Airborne;
  p.snapshot_index = snapshot.index;
  p.time_s = snapshot.time_s;
  p.nodes = nodes;
  p.arcs = arcs_from_snapshot(snapshot);

  const auto cands = mec_candidates(nodes, snapshot);
  for (const auto& f : flows) {
    if (f.source >= nodes.size() ||
        (f.source < snapshot.positions.size() &&
         !snapshot.positions[f.source])) {
      throw std::invalid_argument("build_airborne_problem: flow source " +
                                  std::to_string(f.source) +
                                  " absent from snapshot");
    }
    Commodity c;
    c.id = f.id;
    c.source = f.source;
    c.label = f.service;
    c.demand_bps = f.demand_bps;
    c.obj_bits = f.demand_bps;  // demand measured over a one-second window
    c.delay_bits = f.packet_bits;
    c.delay_bound_s = f.delay_bound_s;
    c.candidates = cands;
    p.commodities.push_back(c);
  }
  return p;
}

ProblemInstance build_offload_problem(
    const std::vector<NodeMeta>& nodes, const topo::Snapshot& snapshot,
    const std::vector<demand::SatTaskLoad>& loads,
    const demand::ProcessorSpec& mec_processor, const demand::TaskModel& tm) {
  ProblemInstance p;
  p.use_case = UseCase::Offload;
  p.snapshot_index = snapshot.index;
  p.time_s = snapshot.time_s;
  p.nodes = nodes;
  p.arcs = arcs_from_snapshot(snapshot);

  const auto base = mec_candidates(nodes, snapshot);
  std::uint32_t id = 0;
  for (const auto& l : loads) {
    if (l.offloaded_tasks <= 0.0) continue;
    Commodity c;
    c.id = id++;
    c.source = l.satellite;
    c.label = "lambda=" + std::to_string(static_cast<int>(l.lambda));
    c.demand_bps = l.offload_bandwidth_bps;
    c.obj_bits = l.offload_bandwidth_bps;
    c.delay_bits = l.offload_bandwidth_bps;
    c.delay_bound_s = tm.deadline_s;
    c.candidates = base;
    for (auto& cand : c.candidates) {
      cand.compute_latency_s =
          demand::mec_compute_latency(l.offloaded_tasks, mec_processor, tm);
    }
    p.commodities.push_back(c);
  }
  return p;
}

void restrict_candidates(
    ProblemInstance& problem,
    const std::vector<std::pair<std::uint32_t, NodeId>>& fixed_destinations) {
  for (auto& c : problem.commodities) {
    const auto it = std::find_if(
        fixed_destinations.begin(), fixed_destinations.end(),
        [&c](const auto& fd) { return fd.first == c.id; });
    if (it == fixed_destinations.end()) continue;
    std::vector<Candidate> keep;
    for (const auto& cand : c.candidates)
      if (cand.node == it->second) keep.push_back(cand);
    c.candidates = std::move(keep);
  }
}

// ---------------------------------------------------------------------------
// Delay-bounded shortest paths (label setting with dominance pruning)

namespace {

struct Adjacency {
  std::vector<std::vector<int>> out;  // arc indices, ordered by head id
  std::vector<std::vector<int>> in;

  explicit Adjacency(const ProblemInstance& p)
      : out(p.nodes.size()), in(p.nodes.size()) {
    for (int i = 0; i < static_cast<int>(p.arcs.size()); ++i) {
      out[p.arcs[i].from].push_back(i);
      in[p.arcs[i].to].push_back(i);
    }
  }
};

struct Label {
  double cost;
  double delay;
};

// Pareto front of (cost, delay) labels per node.
class ParetoTable {
 public:
  explicit ParetoTable(std::size_t n) : fronts_(n) {}

  bool insert(std::size_t node, Label l) {
    auto& f = fronts_[node];
    for (const auto& e : f) {
      if (e.cost <= l.cost + kTimeTol && e.delay <= l.delay + kTimeTol)
        return false;
    }
    std::erase_if(f, [&l](const Label& e) {
      return l.cost <= e.cost + kTimeTol && l.delay <= e.delay + kTimeTol;
    });
    f.push_back(l);
    return true;
  }

  const std::vector<Label>& labels(std::size_t node) const {
    return fronts_[node];
  }

  double min_cost(std::size_t node, double delay_budget) const {
    double best = kInf;
    for (const auto& l : fronts_[node])
      if (l.delay <= delay_budget + kTimeTol) best = std::min(best, l.cost);
    return best;
  }

 private:
  std::vector<std::vector<Label>> fronts_;
};

// Cost/delay needed to reach `dest` from every node. Capacity-free except
// for single-commodity arc admissibility; satellite->gateway arcs are gated
// to the destination gateway.
ParetoTable backward_table(const ProblemInstance& p, const Adjacency& adj,
                           const Commodity& c, NodeId dest,
                           double delay_budget) {
  ParetoTable table(p.nodes.size());
  if (delay_budget < -kTimeTol) return table;
  table.insert(dest, {0.0, 0.0});
  std::vector<NodeId> queue = {dest};
  while (!queue.empty()) {
    const NodeId v = queue.back();
    queue.pop_back();
    const auto snapshot = table.labels(v);  // copy: inserts touch other nodes
    for (int ai : adj.in[v]) {
      const Arc& a = p.arcs[ai];
      if (!arc_admissible(c, a)) continue;
      if (is_sat_to_gw(p, a) && a.to != dest) continue;
      const double w_cost = p.objective_weight(c, a);
      const double w_delay = p.delay_weight(c, a);
      bool changed = false;
      for (const Label& lv : snapshot) {
        const Label cand{lv.cost + w_cost, lv.delay + w_delay};
        if (cand.delay > delay_budget + kTimeTol) continue;
        if (table.insert(a.from, cand)) changed = true;
      }
      if (changed &&
          std::find(queue.begin(), queue.end(), a.from) == queue.end()) {
        queue.push_back(a.from);
      }
    }
  }
  return table;
}

// Forward search with parent pointers on the residual graph. Returns the
// minimum-cost delay-feasible path source->dest or nullopt.
struct ResidualState {
  std::vector<double> used_bps;     // per arc
  std::vector<NodeId> lock_sat;     // per node (gateways): feeding satellite
  std::vector<int> lock_count;

  explicit ResidualState(const ProblemInstance& p)
      : used_bps(p.arcs.size(), 0.0),
        lock_sat(p.nodes.size(), kNoNode),
        lock_count(p.nodes.size(), 0) {}

  bool arc_usable(const ProblemInstance& p, const Commodity& c, int ai,
                  NodeId dest) const {
    const Arc& a = p.arcs[ai];
    if (!arc_admissible(c, a)) return false;
    if (used_bps[ai] + c.demand_bps > a.capacity_bps * (1.0 + kCapacitySlack))
      return false;
    if (is_sat_to_gw(p, a)) {
      if (a.to != dest) return false;
      if (lock_sat[a.to] != kNoNode && lock_sat[a.to] != a.from) return false;
    }
    return true;
  }

  void apply(const ProblemInstance& p, const Commodity& c,
             const std::vector<int>& arc_ids) {
    for (int ai : arc_ids) {
      used_bps[ai] += c.demand_bps;
      const Arc& a = p.arcs[ai];
      if (is_sat_to_gw(p, a)) {
        lock_sat[a.to] = a.from;
        ++lock_count[a.to];
      }
    }
  }

  void undo(const ProblemInstance& p, const Commodity& c,
            const std::vector<int>& arc_ids) {
    for (int ai : arc_ids) {
      used_bps[ai] -= c.demand_bps;
      const Arc& a = p.arcs[ai];
      if (is_sat_to_gw(p, a)) {
        if (--lock_count[a.to] == 0) lock_sat[a.to] = kNoNode;
      }
    }
  }
};

struct PathResult {
  double cost = kInf;
  double delay = 0.0;
  std::vector<NodeId> path;
  std::vector<int> arc_ids;
};

std::optional<PathResult> residual_csp(const ProblemInstance& p,
                                       const Adjacency& adj,
                                       const Commodity& c, NodeId dest,
                                       double delay_budget,
                                       const ResidualState& state) {
  if (delay_budget < -kTimeTol) return std::nullopt;
  if (c.source == dest) {
    return PathResult{0.0, 0.0, {c.source}, {}};
  }
  struct FullLabel {
    NodeId node;
    double cost;
    double delay;
    int parent;  // index into arena
    int arc;     // arc taken into node
  };
  std::vector<FullLabel> arena;
  ParetoTable fronts(p.nodes.size());
  arena.push_back({c.source, 0.0, 0.0, -1, -1});
  fronts.insert(c.source, {0.0, 0.0});
  std::vector<int> queue = {0};
  int best = -1;
  while (!queue.empty()) {
    const int li = queue.back();
    queue.pop_back();
    const FullLabel lab = arena[li];
    // Stale labels (dominated after being queued) are harmless: dominated
    // extensions are rejected at insert.
    if (lab.node == dest) continue;
    for (int ai : adj.out[lab.node]) {
      if (!state.arc_usable(p, c, ai, dest)) continue;
      const Arc& a = p.arcs[ai];
      const double ncost = lab.cost + p.objective_weight(c, a);
      const double ndelay = lab.delay + p.delay_weight(c, a);
      if (ndelay > delay_budget + kTimeTol) continue;
      if (!fronts.insert(a.to, {ncost, ndelay})) continue;
      arena.push_back({a.to, ncost, ndelay, li, ai});
      const int ni = static_cast<int>(arena.size()) - 1;
      if (a.to == dest) {
        if (best < 0 || ncost < arena[best].cost - kTimeTol ||
            (ncost < arena[best].cost + kTimeTol &&
             ndelay < arena[best].delay - kTimeTol)) {
          best = ni;
        }
      } else {
        queue.push_back(ni);
      }
    }
  }
  if (best < 0) return std::nullopt;
  PathResult r;
  r.cost = arena[best].cost;
  r.delay = arena[best].delay;
  for (int li = best; li >= 0; li = arena[li].parent) {
    r.path.push_back(arena[li].node);
    if (arena[li].arc >= 0) r.arc_ids.push_back(arena[li].arc);
  }
  std::reverse(r.path.begin(), r.path.end());
  std::reverse(r.arc_ids.begin(), r.arc_ids.end());
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Greedy heuristic (incumbent seeding; incomplete by design)

Solution greedy_heuristic(const ProblemInstance& problem) {
  Solution s;
  const Adjacency adj(problem);
  ResidualState state(problem);
  const auto order = routing_order(problem);
  for (int ci : order) {
    const Commodity& c = problem.commodities[ci];
    const Candidate* best_cand = nullptr;
    std::optional<PathResult> best_path;
    double best_total = kInf;
    for (const auto& cand : c.candidates) {
      const double tau_eff = c.delay_bound_s - cand.compute_latency_s;
      auto pr = residual_csp(problem, adj, c, cand.node, tau_eff, state);
      if (!pr) continue;
      const double total = pr->cost + cand.compute_latency_s;
      if (total < best_total - kTimeTol) {
        best_total = total;
        best_cand = &cand;
        best_path = std::move(pr);
      }
    }
    if (!best_cand) {
      s.status = SolveStatus::Infeasible;
      return s;
    }
    state.apply(problem, c, best_path->arc_ids);
    s.routes.push_back(make_route(problem, c, *best_cand, best_path->path));
    s.objective_s += best_total;
  }
  s.status = SolveStatus::Optimal;  // feasible; optimality not guaranteed
  finalize_solution(problem, s);
  return s;
}

// ---------------------------------------------------------------------------
// Exact solver: depth-first branch and bound over destination choices and
// delay-bounded routing on residual capacities.

namespace {

class ExactSolver {
 public:
  ExactSolver(const ProblemInstance& p, const SolveLimits& limits)
      : p_(p), limits_(limits), adj_(p), state_(p) {}

  Solution run() {
    Solution out;
    const std::size_t nc = p_.commodities.size();
    if (nc == 0) {
      out.status = SolveStatus::Optimal;
      return out;
    }

    order_ = routing_order(p_);

    // Capacity-free bounds per commodity and candidate.
    tables_.resize(nc);
    cand_lb_.resize(nc);
    lb_.assign(nc, kInf);
    for (std::size_t i = 0; i < nc; ++i) {
      const Commodity& c = p_.commodities[i];
      tables_[i].reserve(c.candidates.size());
      cand_lb_[i].assign(c.candidates.size(), kInf);
      for (std::size_t k = 0; k < c.candidates.size(); ++k) {
        const auto& cand = c.candidates[k];
        const double tau_eff = c.delay_bound_s - cand.compute_latency_s;
        tables_[i].push_back(
            backward_table(p_, adj_, c, cand.node, tau_eff));
        const double csp = tables_[i][k].min_cost(c.source, tau_eff);
        if (csp < kInf) {
          cand_lb_[i][k] = csp + cand.compute_latency_s;
          lb_[i] = std::min(lb_[i], cand_lb_[i][k]);
        }
      }
      if (lb_[i] == kInf) {
        out.status = SolveStatus::Infeasible;  // unroutable even alone
        return out;
      }
    }

    suffix_lb_.assign(nc + 1, 0.0);
    for (std::size_t i = nc; i > 0; --i)
      suffix_lb_[i - 1] = suffix_lb_[i] + lb_[order_[i - 1]];

    const Solution greedy = greedy_heuristic(p_);
    ub_ = greedy.status == SolveStatus::Optimal ? greedy.objective_s + 1e-9
                                                : kInf;

    current_.resize(nc);
    start_ = std::chrono::steady_clock::now();
    descend(0, 0.0);

    if (aborted_) {
      out.status = SolveStatus::BudgetExceeded;
      if (has_best_) {
        out.routes = best_;
        out.objective_s = best_obj_;
      } else if (greedy.status == SolveStatus::Optimal) {
        out.routes = greedy.routes;
        out.objective_s = greedy.objective_s;
      }
      out.optimality_gap_s = out.objective_s - suffix_lb_[0];
      out.nodes_explored = nodes_;
      finalize_solution(p_, out);
      return out;
    }
    if (!has_best_) {
      out.status = SolveStatus::Infeasible;
      out.nodes_explored = nodes_;
      return out;
    }
    out.status = SolveStatus::Optimal;
    out.routes = best_;
    out.objective_s = best_obj_;
    out.nodes_explored = nodes_;
    finalize_solution(p_, out);
    return out;
  }

 private:
  void tick() {
    if (++nodes_ >= limits_.node_budget) aborted_ = true;
    if ((nodes_ & 0x1FFF) == 0) {
      const auto dt = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start_)
                          .count();
      if (dt > limits_.time_budget_s) aborted_ = true;
    }
  }

  void descend(std::size_t oi, double gcost) {
    if (aborted_) return;
    if (oi == order_.size()) {
      if (!has_best_ || gcost < best_obj_ - kTimeTol) {
        has_best_ = true;
        best_obj_ = gcost;
        best_ = current_;
        ub_ = std::min(ub_, gcost);
      }
      return;
    }
    const int ci = order_[oi];
    const Commodity& c = p_.commodities[ci];
    for (std::size_t k = 0; k < c.candidates.size(); ++k) {
      if (aborted_) return;
      tick();
      if (cand_lb_[ci][k] == kInf) continue;
      if (gcost + cand_lb_[ci][k] + suffix_lb_[oi + 1] >= ub_ - kTimeTol)
        continue;
      std::vector<char> visited(p_.nodes.size(), 0);
      visited[c.source] = 1;
      std::vector<NodeId> path = {c.source};
      std::vector<int> arc_ids;
      path_dfs(oi, ci, k, c.source, 0.0, 0.0, gcost, visited, path, arc_ids);
    }
  }

  void path_dfs(std::size_t oi, int ci, std::size_t k, NodeId v, double pcost,
                double pdelay, double gcost, std::vector<char>& visited,
                std::vector<NodeId>& path, std::vector<int>& arc_ids) {
    if (aborted_) return;
    const Commodity& c = p_.commodities[ci];
    const Candidate& cand = c.candidates[k];
    if (v == cand.node) {
      state_.apply(p_, c, arc_ids);
      current_[oi] = make_route(p_, c, cand, path);
      descend(oi + 1, gcost + pcost + cand.compute_latency_s);
      state_.undo(p_, c, arc_ids);
      return;
    }
    const double tau_eff = c.delay_bound_s - cand.compute_latency_s;
    for (int ai : adj_.out[v]) {
      if (aborted_) return;
      const Arc& a = p_.arcs[ai];
      if (visited[a.to]) continue;
      if (!state_.arc_usable(p_, c, ai, cand.node)) continue;
      const double ncost = pcost + p_.objective_weight(c, a);
      const double ndelay = pdelay + p_.delay_weight(c, a);
      if (ndelay > tau_eff + kTimeTol) continue;
      const double h = tables_[ci][k].min_cost(a.to, tau_eff - ndelay);
      if (h == kInf) continue;
      if (gcost + ncost + h + cand.compute_latency_s + suffix_lb_[oi + 1] >=
          ub_ - kTimeTol)
        continue;
      tick();
      visited[a.to] = 1;
      path.push_back(a.to);
      arc_ids.push_back(ai);
      path_dfs(oi, ci, k, a.to, ncost, ndelay, gcost, visited, path, arc_ids);
      arc_ids.pop_back();
      path.pop_back();
      visited[a.to] = 0;
    }
  }

  const ProblemInstance& p_;
  SolveLimits limits_;
  Adjacency adj_;
  ResidualState state_;
  std::vector<int> order_;
  std::vector<std::vector<ParetoTable>> tables_;  // [commodity][candidate]
  std::vector<std::vector<double>> cand_lb_;
  std::vector<double> lb_;
  std::vector<double> suffix_lb_;
  std::vector<CommodityRoute> current_;
  std::vector<CommodityRoute> best_;
  double best_obj_ = kInf;
  double ub_ = kInf;
  bool has_best_ = false;
  bool aborted_ = false;
  std::uint64_t nodes_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

Solution solve_exact(const ProblemInstance& problem,
                     const SolveLimits& limits) {
  ExactSolver solver(problem, limits);
  return solver.run();
}

// ---------------------------------------------------------------------------
// Brute-force oracle: exhaustive enumeration of destination assignments and
// simple delay-feasible paths, implemented independently of the solver's
// search machinery.

namespace {

struct OracleOption {
  Candidate cand;
  std::vector<NodeId> path;
  std::vector<int> arc_ids;
  double total_cost;   // path cost + compute
};

void oracle_enumerate_paths(const ProblemInstance& p, const Adjacency& adj,
                            const Commodity& c, const Candidate& cand,
                            NodeId v, double pcost, double pdelay,
                            std::vector<char>& visited,
                            std::vector<NodeId>& path,
                            std::vector<int>& arc_ids,
                            std::vector<OracleOption>& out) {
  if (out.size() > 2'000'000)
    throw OracleTooLarge("oracle: per-commodity path enumeration too large");
  if (v == cand.node) {
    out.push_back({cand, path, arc_ids, pcost + cand.compute_latency_s});
    return;
  }
  const double tau_eff = c.delay_bound_s - cand.compute_latency_s;
  for (int ai : adj.out[v]) {
    const Arc& a = p.arcs[ai];
    if (visited[a.to]) continue;
    if (!arc_admissible(c, a)) continue;
    if (is_sat_to_gw(p, a) &&
        (a.to != cand.node))
      continue;
    const double ndelay = pdelay + p.delay_weight(c, a);
    if (ndelay > tau_eff + kTimeTol) continue;  // weights are positive
    visited[a.to] = 1;
    path.push_back(a.to);
    arc_ids.push_back(ai);
    oracle_enumerate_paths(p, adj, c, cand, a.to,
                           pcost + p.objective_weight(c, a), ndelay, visited,
                           path, arc_ids, out);
    arc_ids.pop_back();
    path.pop_back();
    visited[a.to] = 0;
  }
}

struct OracleSearch {
  const ProblemInstance& p;
  const std::vector<int>& order;
  const std::vector<std::vector<OracleOption>>& options;  // by order position
  std::vector<double> used;
  std::vector<NodeId> gw_sat;  // kNoNode = unassigned
  std::vector<int> gw_uses;
  std::vector<const OracleOption*> chosen;
  std::vector<const OracleOption*> best;
  double best_obj = kInf;
  bool found = false;

  void search(std::size_t oi, double cost) {
    if (oi == order.size()) {
      if (!found || cost < best_obj - kTimeTol) {
        found = true;
        best_obj = cost;
        best = chosen;
      }
      return;
    }
    const Commodity& c = p.commodities[order[oi]];
    for (const auto& opt : options[oi]) {
      bool ok = true;
      for (int ai : opt.arc_ids) {
        if (used[ai] + c.demand_bps >
            p.arcs[ai].capacity_bps * (1.0 + kCapacitySlack)) {
          ok = false;
          break;
        }
        const Arc& a = p.arcs[ai];
        if (is_sat_to_gw(p, a) && gw_sat[a.to] != kNoNode &&
            gw_sat[a.to] != a.from) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      for (int ai : opt.arc_ids) {
        used[ai] += c.demand_bps;
        const Arc& a = p.arcs[ai];
        if (is_sat_to_gw(p, a)) {
          gw_sat[a.to] = a.from;
          ++gw_uses[a.to];
        }
      }
      chosen[oi] = &opt;
      search(oi + 1, cost + opt.total_cost);
      for (int ai : opt.arc_ids) {
        used[ai] -= c.demand_bps;
        const Arc& a = p.arcs[ai];
        if (is_sat_to_gw(p, a)) {
          if (--gw_uses[a.to] == 0) gw_sat[a.to] = kNoNode;
        }
      }
    }
  }
};

}  // namespace

Solution solve_oracle(const ProblemInstance& problem) {
  Solution s;
  if (problem.commodities.empty()) {
    s.status = SolveStatus::Optimal;
    return s;
  }
  const Adjacency adj(problem);
  const auto order = routing_order(problem);

  std::vector<std::vector<OracleOption>> options(order.size());
  double combinations = 1.0;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const Commodity& c = problem.commodities[order[oi]];
    for (const auto& cand : c.candidates) {
      std::vector<char> visited(problem.nodes.size(), 0);
      visited[c.source] = 1;
      std::vector<NodeId> path = {c.source};
      std::vector<int> arc_ids;
      oracle_enumerate_paths(problem, adj, c, cand, c.source, 0.0, 0.0,
                             visited, path, arc_ids, options[oi]);
    }
    if (options[oi].empty()) {
      s.status = SolveStatus::Infeasible;
      return s;
    }
    combinations *= static_cast<double>(options[oi].size());
    if (combinations > 1e6)
      throw OracleTooLarge("oracle: combination count exceeds 1e6");
  }

  OracleSearch search{problem, order, options, {}, {}, {}, {}, {}};
  search.used.assign(problem.arcs.size(), 0.0);
  search.gw_sat.assign(problem.nodes.size(), kNoNode);
  search.gw_uses.assign(problem.nodes.size(), 0);
  search.chosen.resize(order.size());
  search.search(0, 0.0);

  if (!search.found) {
    s.status = SolveStatus::Infeasible;
    return s;
  }
  s.status = SolveStatus::Optimal;
  s.objective_s = search.best_obj;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const Commodity& c = problem.commodities[order[oi]];
    s.routes.push_back(
        make_route(problem, c, search.best[oi]->cand, search.best[oi]->path));
  }
  finalize_solution(problem, s);
  return s;
}

// ---------------------------------------------------------------------------
// Independent constraint validator

namespace {

const Candidate* find_candidate(const Commodity& c, NodeId node) {
  for (const auto& cand : c.candidates)
    if (cand.node == node) return &cand;
  return nullptr;
}

int find_arc(const ProblemInstance& p, NodeId from, NodeId to) {
  for (int i = 0; i < static_cast<int>(p.arcs.size()); ++i)
    if (p.arcs[i].from == from && p.arcs[i].to == to) return i;
  return -1;
}

}  // namespace

ValidationReport validate_solution(const ProblemInstance& problem,
                                   const Solution& solution) {
  ValidationReport report;
  auto add = [&report](std::string name, bool pass, std::string detail = "") {
    report.checks.push_back({std::move(name), pass, std::move(detail)});
    report.feasible = report.feasible && pass;
  };

  // One destination per commodity, chosen from its candidate set.
  {
    bool pass = solution.routes.size() == problem.commodities.size();
    std::string detail;
    for (const auto& c : problem.commodities) {
      int count = 0;
      for (const auto& r : solution.routes)
        if (r.commodity == c.id) {
          ++count;
          if (!find_candidate(c, r.destination)) {
            pass = false;
            detail = "commodity " + std::to_string(c.id) +
                     " destination not a candidate";
          }
        }
      if (count != 1) {
        pass = false;
        detail = "commodity " + std::to_string(c.id) + " has " +
                 std::to_string(count) + " routes";
      }
    }
    add("single_destination", pass, detail);
  }

  // Path structure: simple source->destination walks over existing arcs.
  {
    bool pass = true;
    std::string detail;
    for (const auto& r : solution.routes) {
      const auto* c = [&]() -> const Commodity* {
        for (const auto& cc : problem.commodities)
          if (cc.id == r.commodity) return &cc;
        return nullptr;
      }();
      if (!c) continue;
      if (r.path.empty() || r.path.front() != c->source ||
          r.path.back() != r.destination) {
        pass = false;
        detail = "commodity " + std::to_string(r.commodity) +
                 " path endpoints wrong";
        continue;
      }
      std::vector<NodeId> sorted = r.path;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        pass = false;
        detail =
            "commodity " + std::to_string(r.commodity) + " path not simple";
      }
      for (std::size_t i = 0; i + 1 < r.path.size(); ++i) {
        if (find_arc(problem, r.path[i], r.path[i + 1]) < 0) {
          pass = false;
          detail = "commodity " + std::to_string(r.commodity) + " uses arc " +
                   std::to_string(r.path[i]) + "->" +
                   std::to_string(r.path[i + 1]) + " absent from snapshot";
        }
      }
    }
    add("flow_conservation", pass, detail);
  }

  // Packet (or task) delay bound.
  {
    bool pass = true;
    std::string detail;
    for (const auto& r : solution.routes) {
      const Commodity* c = nullptr;
      for (const auto& cc : problem.commodities)
        if (cc.id == r.commodity) c = &cc;
      if (!c) continue;
      const Candidate* cand = find_candidate(*c, r.destination);
      double delay = cand ? cand->compute_latency_s : 0.0;
      for (std::size_t i = 0; i + 1 < r.path.size(); ++i) {
        const int ai = find_arc(problem, r.path[i], r.path[i + 1]);
        if (ai >= 0) delay += problem.delay_weight(*c, problem.arcs[ai]);
      }
      if (delay > c->delay_bound_s + kTimeTol) {
        pass = false;
        detail = "commodity " + std::to_string(r.commodity) + " delay " +
                 std::to_string(delay) + " exceeds bound";
      }
    }
    add("packet_delay", pass, detail);
  }

  // Bandwidth per directed arc.
  {
    std::vector<double> used(problem.arcs.size(), 0.0);
    for (const auto& r : solution.routes) {
      const Commodity* c = nullptr;
      for (const auto& cc : problem.commodities)
        if (cc.id == r.commodity) c = &cc;
      if (!c) continue;
      for (std::size_t i = 0; i + 1 < r.path.size(); ++i) {
        const int ai = find_arc(problem, r.path[i], r.path[i + 1]);
        if (ai >= 0) used[ai] += c->demand_bps;
      }
    }
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < used.size(); ++i) {
      if (used[i] > problem.arcs[i].capacity_bps * (1.0 + kCapacitySlack)) {
        pass = false;
        detail = "arc " + std::to_string(problem.arcs[i].from) + "->" +
                 std::to_string(problem.arcs[i].to) + " carries " +
                 std::to_string(used[i]) + " bps over capacity";
      }
    }
    add("bandwidth", pass, detail);
  }

  // At most one satellite feeds each gateway; flows entering a gateway from
  // a satellite must terminate there.
  {
    std::vector<std::vector<NodeId>> feeders(problem.nodes.size());
    bool gating_pass = true;
    std::string gating_detail;
    for (const auto& r : solution.routes) {
      for (std::size_t i = 0; i + 1 < r.path.size(); ++i) {
        const NodeId u = r.path[i], v = r.path[i + 1];
        if (problem.nodes[u].cls == topo::NodeClass::Satellite &&
            problem.nodes[v].cls == topo::NodeClass::Gateway) {
          auto& f = feeders[v];
          if (std::find(f.begin(), f.end(), u) == f.end()) f.push_back(u);
          if (r.destination != v) {
            gating_pass = false;
            gating_detail = "commodity " + std::to_string(r.commodity) +
                            " crosses sat->gw arc to a non-destination";
          }
        }
      }
    }
    bool match_pass = true;
    std::string match_detail;
    for (std::size_t g = 0; g < feeders.size(); ++g) {
      if (feeders[g].size() > 1) {
        match_pass = false;
        match_detail =
            "gateway " + std::to_string(g) + " fed by multiple satellites";
      }
    }
    add("gateway_matching", match_pass, match_detail);
    add("gateway_destination", gating_pass, gating_detail);
  }

  // Stored objective must decompose into recomputed arc weights.
  {
    double recomputed = 0.0;
    for (const auto& r : solution.routes) {
      const Commodity* c = nullptr;
      for (const auto& cc : problem.commodities)
        if (cc.id == r.commodity) c = &cc;
      if (!c) continue;
      const Candidate* cand = find_candidate(*c, r.destination);
      if (cand) recomputed += cand->compute_latency_s;
      for (std::size_t i = 0; i + 1 < r.path.size(); ++i) {
        const int ai = find_arc(problem, r.path[i], r.path[i + 1]);
        if (ai >= 0) recomputed += problem.objective_weight(*c, problem.arcs[ai]);
      }
    }
    const bool pass = std::fabs(recomputed - solution.objective_s) <= 1e-9;
    add("objective_decomposition", pass,
        pass ? "" : "stated " + std::to_string(solution.objective_s) +
                        " vs recomputed " + std::to_string(recomputed));
  }

  return report;
}

// ---------------------------------------------------------------------------
// Dumps

namespace {

using json = nlohmann::ordered_json;

const char* cls_name(topo::NodeClass c) {
  switch (c) {
    case topo::NodeClass::Satellite: return "sat";
    case topo::NodeClass::Aircraft: return "air";
    case topo::NodeClass::Gateway: return "gw";
  }
  return "?";
}

topo::NodeClass cls_from_name(const std::string& s) {
  if (s == "sat") return topo::NodeClass::Satellite;
  if (s == "air") return topo::NodeClass::Aircraft;
  if (s == "gw") return topo::NodeClass::Gateway;
  throw std::invalid_argument("unknown node class: " + s);
}

json instance_to_json(const ProblemInstance& p) {
  json j;
  j["format"] = "aamec-instance-v1";
  j["use_case"] = p.use_case == UseCase::Airborne ? "airborne" : "offload";
  j["snapshot_index"] = p.snapshot_index;
  j["time_s"] = p.time_s;
  j["nodes"] = json::array();
  for (const auto& n : p.nodes) {
    j["nodes"].push_back({{"id", n.id},
                          {"class", cls_name(n.cls)},
                          {"mec", n.has_mec},
                          {"name", n.name}});
  }
  j["arcs"] = json::array();
  for (const auto& a : p.arcs) {
    j["arcs"].push_back({{"from", a.from},
                         {"to", a.to},
                         {"type", topo::link_type_name(a.type)},
                         {"distance_m", a.distance_m},
                         {"capacity_bps", a.capacity_bps}});
  }
  j["commodities"] = json::array();
  for (const auto& c : p.commodities) {
    json cands = json::array();
    for (const auto& cand : c.candidates) {
      cands.push_back(
          {{"node", cand.node}, {"compute_latency_s", cand.compute_latency_s}});
    }
    j["commodities"].push_back({{"id", c.id},
                                {"source", c.source},
                                {"label", c.label},
                                {"demand_bps", c.demand_bps},
                                {"obj_bits", c.obj_bits},
                                {"delay_bits", c.delay_bits},
                                {"delay_bound_s", c.delay_bound_s},
                                {"candidates", cands}});
  }
  return j;
}

std::string fnv1a(const std::string& data) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace

std::string ProblemInstance::content_id() const {
  return fnv1a(instance_to_json(*this).dump());
}

void write_instance(std::ostream& os, const ProblemInstance& problem) {
  json j = instance_to_json(problem);
  j["id"] = problem.content_id();
  os << j.dump(2) << "\n";
}

ProblemInstance read_instance(std::istream& is) {
  json j = json::parse(is);
  if (j.value("format", "") != "aamec-instance-v1")
    throw std::invalid_argument("not an aamec instance file");
  ProblemInstance p;
  p.use_case = j.at("use_case").get<std::string>() == "airborne"
                   ? UseCase::Airborne
                   : UseCase::Offload;
  p.snapshot_index = j.at("snapshot_index").get<int>();
  p.time_s = j.at("time_s").get<double>();
  for (const auto& n : j.at("nodes")) {
    NodeMeta m;
    m.id = n.at("id").get<NodeId>();
    m.cls = cls_from_name(n.at("class").get<std::string>());
    m.has_mec = n.at("mec").get<bool>();
    m.name = n.at("name").get<std::string>();
    p.nodes.push_back(m);
  }
  for (const auto& a : j.at("arcs")) {
    Arc arc;
    arc.from = a.at("from").get<NodeId>();
    arc.to = a.at("to").get<NodeId>();
    const auto t = topo::link_type_from_name(a.at("type").get<std::string>());
    if (!t) throw std::invalid_argument("unknown link type in instance file");
    arc.type = *t;
    arc.distance_m = a.at("distance_m").get<double>();
    arc.capacity_bps = a.at("capacity_bps").get<double>();
    p.arcs.push_back(arc);
  }
  for (const auto& cj : j.at("commodities")) {
    Commodity c;
    c.id = cj.at("id").get<std::uint32_t>();
    c.source = cj.at("source").get<NodeId>();
    c.label = cj.at("label").get<std::string>();
    c.demand_bps = cj.at("demand_bps").get<double>();
    c.obj_bits = cj.at("obj_bits").get<double>();
    c.delay_bits = cj.at("delay_bits").get<double>();
    c.delay_bound_s = cj.at("delay_bound_s").get<double>();
    for (const auto& cand : cj.at("candidates")) {
      c.candidates.push_back({cand.at("node").get<NodeId>(),
                              cand.at("compute_latency_s").get<double>()});
    }
    p.commodities.push_back(c);
  }
  return p;
}

void write_solution(std::ostream& os, const ProblemInstance& problem,
                    const Solution& solution) {
  json j;
  j["format"] = "aamec-solution-v1";
  j["instance_id"] = problem.content_id();
  j["status"] = solution.status == SolveStatus::Optimal      ? "optimal"
                : solution.status == SolveStatus::Infeasible ? "infeasible"
                                                             : "budget";
  j["objective_s"] = solution.objective_s;
  j["routes"] = json::array();
  for (const auto& r : solution.routes) {
    j["routes"].push_back({{"commodity", r.commodity},
                           {"destination", r.destination},
                           {"path", r.path}});
  }
  j["gateway_matching"] = json::array();
  for (const auto& [s, g] : solution.gateway_matching)
    j["gateway_matching"].push_back({s, g});
  os << j.dump(2) << "\n";
}

std::pair<Solution, std::string> read_solution(std::istream& is) {
  json j = json::parse(is);
  if (j.value("format", "") != "aamec-solution-v1")
    throw std::invalid_argument("not an aamec solution file");
  Solution s;
  const auto status = j.at("status").get<std::string>();
  s.status = status == "optimal"      ? SolveStatus::Optimal
             : status == "infeasible" ? SolveStatus::Infeasible
                                      : SolveStatus::BudgetExceeded;
  s.objective_s = j.at("objective_s").get<double>();
  for (const auto& rj : j.at("routes")) {
    CommodityRoute r;
    r.commodity = rj.at("commodity").get<std::uint32_t>();
    r.destination = rj.at("destination").get<NodeId>();
    r.path = rj.at("path").get<std::vector<NodeId>>();
    s.routes.push_back(r);
  }
  for (const auto& gm : j.at("gateway_matching")) {
    s.gateway_matching.emplace_back(gm.at(0).get<NodeId>(),
                                    gm.at(1).get<NodeId>());
  }
  return {s, j.at("instance_id").get<std::string>()};
}

}  // namespace aamec::opt
