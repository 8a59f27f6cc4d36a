#include "aamec/topology.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "aamec/rng.hpp"

namespace aamec::topo {

double capacity_bps(LinkType t) {
  switch (t) {
    case LinkType::SatSat: return 125e6;
    case LinkType::SatAir: return 112e6;
    case LinkType::SatGw: return 500e6;
    case LinkType::AirAir: return 45e6;
    case LinkType::AirGw: return 75e6;
  }
  throw std::logic_error("capacity_bps: bad link type");
}

const char* link_type_name(LinkType t) {
  switch (t) {
    case LinkType::SatSat: return "sat-sat";
    case LinkType::SatAir: return "sat-air";
    case LinkType::SatGw: return "sat-gw";
    case LinkType::AirAir: return "air-air";
    case LinkType::AirGw: return "air-gw";
  }
  return "?";
}

std::optional<LinkType> link_type_from_name(const std::string& name) {
  if (name == "sat-sat") return LinkType::SatSat;
  if (name == "sat-air") return LinkType::SatAir;
  if (name == "sat-gw") return LinkType::SatGw;
  if (name == "air-air") return LinkType::AirAir;
  if (name == "air-gw") return LinkType::AirGw;
  return std::nullopt;
}

std::vector<NodeInfo> Scenario::nodes() const {
  std::vector<NodeInfo> out;
  NodeId id = 0;
  for (int p = 0; p < shell.plane_count; ++p) {
    for (int s = 0; s < shell.sats_per_plane; ++s) {
      NodeInfo n;
      n.id = id++;
      n.cls = NodeClass::Satellite;
      n.name = "sat-" + std::to_string(p) + "-" + std::to_string(s);
      n.plane = p;
      n.slot = s;
      out.push_back(n);
    }
  }
  for (const auto& f : flights) {
    NodeInfo n;
    n.id = id++;
    n.cls = NodeClass::Aircraft;
    n.name = f.name;
    n.route = f.route;
    n.passengers = f.passengers;
    out.push_back(n);
  }
  for (const auto& g : gateways) {
    NodeInfo n;
    n.id = id++;
    n.cls = NodeClass::Gateway;
    n.name = g.name;
    n.location = g.location;
    n.has_mec = true;
    out.push_back(n);
  }
  return out;
}

std::vector<std::pair<NodeId, NodeId>> select_isls(
    const geom::OrbitShell& shell) {
  std::vector<std::pair<NodeId, NodeId>> isls;
  const int planes = shell.plane_count;
  const int per_plane = shell.sats_per_plane;
  auto id = [per_plane](int p, int s) {
    return static_cast<NodeId>(p * per_plane + s);
  };
  auto add = [&isls](NodeId a, NodeId b) {
    if (a > b) std::swap(a, b);
    if (a == b) return;
    if (std::find(isls.begin(), isls.end(), std::make_pair(a, b)) ==
        isls.end()) {
      isls.emplace_back(a, b);
    }
  };
  for (int p = 0; p < planes; ++p) {
    for (int s = 0; s < per_plane; ++s) {
      if (per_plane > 1) add(id(p, s), id(p, (s + 1) % per_plane));
      if (p + 1 < planes) add(id(p, s), id(p + 1, s));  // no seam wrap
    }
  }
  std::sort(isls.begin(), isls.end());
  return isls;
}

std::vector<NodeId> assign_mec_aircraft(const Scenario& scenario,
                                        double ratio) {
  if (ratio < 0.0 || ratio > 1.0)
    throw std::invalid_argument("mec_aircraft_ratio out of [0,1]");
  const auto all = scenario.nodes();
  std::vector<NodeId> aircraft;
  for (const auto& n : all)
    if (n.cls == NodeClass::Aircraft) aircraft.push_back(n.id);

  auto stream = rng::Stream::keyed(scenario.rng_seed, 0x6d6563ULL);
  // Fisher-Yates; the prefix of the permutation is the MEC fleet, so nested
  // ratios select nested sets.
  for (std::size_t i = aircraft.size(); i > 1; --i) {
    const auto j = stream.next_below(i);
    std::swap(aircraft[i - 1], aircraft[j]);
  }
  const auto count = static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(aircraft.size())));
  aircraft.resize(count);
  std::sort(aircraft.begin(), aircraft.end());
  return aircraft;
}

std::vector<NodeId> assign_mec_aircraft(const Scenario& scenario) {
  return assign_mec_aircraft(scenario, scenario.mec_aircraft_ratio);
}

Snapshot build_snapshot(const Scenario& scenario, int index) {
  Snapshot snap;
  snap.index = index;
  snap.time_s = index * scenario.snapshot_interval_s;
  const auto nodes = scenario.nodes();
  snap.positions.resize(nodes.size());

  for (const auto& n : nodes) {
    switch (n.cls) {
      case NodeClass::Satellite:
        snap.positions[n.id] = geom::propagate_satellite(
            scenario.shell, n.plane, n.slot, snap.time_s);
        break;
      case NodeClass::Aircraft:
        snap.positions[n.id] = geom::propagate_aircraft(n.route, snap.time_s);
        break;
      case NodeClass::Gateway:
        snap.positions[n.id] = geom::geodetic_to_ecef(n.location);
        break;
    }
  }

  auto pos = [&snap](NodeId id) { return *snap.positions[id]; };
  auto add_link = [&](NodeId a, NodeId b, LinkType type) {
    if (a > b) std::swap(a, b);
    Link l;
    l.a = a;
    l.b = b;
    l.type = type;
    l.distance_m = geom::distance(pos(a), pos(b));
    l.capacity = capacity_bps(type);
    snap.links.push_back(l);
  };
  auto visible = [&](NodeId a, NodeId b) {
    return geom::line_of_sight(pos(a), pos(b), scenario.los_clearance_m);
  };

  for (const auto& [a, b] : select_isls(scenario.shell)) {
    add_link(a, b, LinkType::SatSat);
  }

  for (const auto& n : nodes) {
    if (!snap.positions[n.id]) continue;
    for (const auto& m : nodes) {
      if (m.id <= n.id || !snap.positions[m.id]) continue;
      if (n.cls == NodeClass::Satellite && m.cls == NodeClass::Aircraft) {
        if (geom::elevation_angle_deg(pos(m.id), pos(n.id)) >=
                scenario.sat_ground_mask_deg &&
            visible(n.id, m.id)) {
          add_link(n.id, m.id, LinkType::SatAir);
        }
      } else if (n.cls == NodeClass::Satellite && m.cls == NodeClass::Gateway) {
        if (geom::elevation_angle_deg(pos(m.id), pos(n.id)) >=
                scenario.sat_ground_mask_deg &&
            visible(n.id, m.id)) {
          add_link(n.id, m.id, LinkType::SatGw);
        }
      } else if (n.cls == NodeClass::Aircraft && m.cls == NodeClass::Aircraft) {
        if (geom::distance(pos(n.id), pos(m.id)) <= scenario.air_air_range_m &&
            visible(n.id, m.id)) {
          add_link(n.id, m.id, LinkType::AirAir);
        }
      } else if (n.cls == NodeClass::Aircraft && m.cls == NodeClass::Gateway) {
        if (geom::elevation_angle_deg(pos(m.id), pos(n.id)) >=
                scenario.air_ground_mask_deg &&
            visible(n.id, m.id)) {
          add_link(n.id, m.id, LinkType::AirGw);
        }
      }
      // Gateway-gateway: terrestrial backhaul is out of model.
    }
  }

  std::sort(snap.links.begin(), snap.links.end(),
            [](const Link& x, const Link& y) {
              return std::tie(x.a, x.b) < std::tie(y.a, y.b);
            });
  return snap;
}

std::vector<Snapshot> snapshot_series(const Scenario& scenario, int jobs) {
  const int count = scenario.snapshot_count();
  std::vector<Snapshot> series(count);
  if (jobs <= 1) {
    for (int r = 0; r < count; ++r) series[r] = build_snapshot(scenario, r);
    return series;
  }
#pragma omp parallel for schedule(static) num_threads(jobs)
  for (int r = 0; r < count; ++r) {
    series[r] = build_snapshot(scenario, r);
  }
  return series;
}

void write_snapshot(std::ostream& os, const Scenario& scenario,
                    const Snapshot& snapshot) {
  const auto nodes = scenario.nodes();
  os << "# aamec snapshot v1\n";
  os << "snapshot " << snapshot.index << " " << snapshot.time_s << "\n";
  for (const auto& n : nodes) {
    if (!snapshot.positions[n.id]) continue;
    const char* cls = n.cls == NodeClass::Satellite ? "sat"
                      : n.cls == NodeClass::Aircraft ? "air"
                                                     : "gw";
    const auto& p = *snapshot.positions[n.id];
    os << "node " << n.id << " " << cls << " " << n.name << " "
       << (n.has_mec ? 1 : 0) << " " << p.x << " " << p.y << " " << p.z
       << "\n";
  }
  for (const auto& l : snapshot.links) {
    os << "link " << l.a << " " << l.b << " " << link_type_name(l.type) << " "
       << l.distance_m << " " << l.capacity << "\n";
  }
}

const std::vector<GatewaySpec>& default_gateways() {
  static const std::vector<GatewaySpec> gws = {
      {"Beijing", {39.92, 116.388, 0.0}},
      {"Fairbanks", {64.838, -147.716, 0.0}},
      {"Iqaluit", {63.733, -68.500, 0.0}},
      {"Izhevsk", {56.850, 53.204, 0.0}},
      {"Longyearbyen", {79.0, 17.66, 0.0}},
      {"PuntaArenas", {-53.315, -71.580, 0.0}},
      {"Rome", {41.9, 12.483, 0.0}},
      {"Tempe", {33.415, -111.909, 0.0}},
      {"Wahiawa", {21.503, -158.024, 0.0}},
      {"Yellowknife", {62.450, -114.350, 0.0}},
  };
  return gws;
}

}  // namespace aamec::topo
