#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aamec/demand.hpp"
#include "aamec/geom.hpp"

// Per-snapshot network graph: node sets, typed capacitated links, ISL
// selection and visibility-gated access links.

namespace aamec::topo {

using NodeId = std::uint32_t;

enum class NodeClass { Satellite, Aircraft, Gateway };

struct NodeInfo {
  NodeId id = 0;
  NodeClass cls = NodeClass::Satellite;
  std::string name;
  // Satellite
  int plane = 0;
  int slot = 0;
  // Aircraft
  geom::FlightRoute route;
  double passengers = 0.0;
  bool has_mec = false;  // always true for gateways
  // Gateway
  geom::GeodeticPoint location;
};

enum class LinkType { SatSat, SatAir, SatGw, AirAir, AirGw };

double capacity_bps(LinkType t);
const char* link_type_name(LinkType t);
std::optional<LinkType> link_type_from_name(const std::string& name);

struct Link {
  NodeId a = 0;  // a < b
  NodeId b = 0;
  LinkType type = LinkType::SatSat;
  double distance_m = 0.0;
  double capacity = 0.0;  // bits/s, fixed by type
};

struct Snapshot {
  int index = 0;
  double time_s = 0.0;
  std::vector<std::optional<geom::EcefPosition>> positions;  // by NodeId
  std::vector<Link> links;
};

struct GatewaySpec {
  std::string name;
  geom::GeodeticPoint location;
};

struct FlightSpec {
  std::string name;
  geom::FlightRoute route;
  double passengers = 180.0;  // N_a
};

struct Scenario {
  geom::OrbitShell shell;
  std::vector<GatewaySpec> gateways;
  std::vector<FlightSpec> flights;
  std::vector<demand::Service> services = demand::default_services();
  double mec_aircraft_ratio = 0.0;
  double horizon_s = 14'400.0;
  double snapshot_interval_s = 300.0;
  std::uint64_t rng_seed = 1;

  // Visibility thresholds.
  double sat_ground_mask_deg = 10.0;  // satellite-gateway and satellite-air
  double air_ground_mask_deg = 5.0;
  double air_air_range_m = 400'000.0;
  double los_clearance_m = 80'000.0;

  // Demand parameters.
  double passenger_service_ratio = 0.2;  // rho_a
  demand::TaskModel task_model;
  demand::ProcessorSpec satellite_processor = demand::cortex_a8();
  demand::ProcessorSpec mec_processor = demand::cortex_a73();
  double task_lambda = 80.0;  // tasks/s per satellite

  // Node table: satellites (plane-major), then aircraft, then gateways.
  std::vector<NodeInfo> nodes() const;
  int snapshot_count() const {
    return static_cast<int>(horizon_s / snapshot_interval_s) + 1;
  }
};

// Intra-plane ring (slot +-1) plus same-slot links to adjacent planes, no
// wrap across the constellation seam. Pairs returned with first < second.
std::vector<std::pair<NodeId, NodeId>> select_isls(
    const geom::OrbitShell& shell);

// Aircraft that carry a MEC server: the first floor(ratio * n) entries of a
// seeded permutation, so nested ratios give nested sets.
std::vector<NodeId> assign_mec_aircraft(const Scenario& scenario);
std::vector<NodeId> assign_mec_aircraft(const Scenario& scenario,
                                        double ratio);

Snapshot build_snapshot(const Scenario& scenario, int index);

std::vector<Snapshot> snapshot_series(const Scenario& scenario, int jobs = 1);

// Structured-text snapshot dump for debugging and golden-file tests.
void write_snapshot(std::ostream& os, const Scenario& scenario,
                    const Snapshot& snapshot);

// The ten Iridium-Next gateways.
const std::vector<GatewaySpec>& default_gateways();

}  // namespace aamec::topo
