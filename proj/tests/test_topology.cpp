#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "aamec/topology.hpp"

using namespace aamec;
using namespace aamec::topo;

namespace {

// Small scenario: one equatorial satellite, two aircraft near the prime
// meridian, gateways under the satellite and on the far side.
Scenario tiny_scenario() {
  Scenario sc;
  sc.shell.plane_count = 1;
  sc.shell.sats_per_plane = 1;
  sc.shell.inclination_deg = 0.0;
  sc.shell.raan_spacing_deg = 0.0;
  sc.gateways = {{"under", {0.0, 0.0, 0.0}}, {"far", {0.0, 180.0, 0.0}}};
  FlightSpec f1{"a1", {}, 180.0};
  f1.route.origin = {1.0, 1.0, 0.0};
  f1.route.destination = {10.0, 40.0, 0.0};
  FlightSpec f2{"a2", {}, 200.0};
  f2.route.origin = {1.0, -1.0, 0.0};
  f2.route.destination = {-10.0, -40.0, 0.0};
  sc.flights = {f1, f2};
  sc.horizon_s = 600.0;
  sc.snapshot_interval_s = 300.0;
  return sc;
}

std::map<NodeId, int> degrees(const std::vector<std::pair<NodeId, NodeId>>& e) {
  std::map<NodeId, int> d;
  for (const auto& [a, b] : e) {
    ++d[a];
    ++d[b];
  }
  return d;
}

}  // namespace

TEST_CASE("link capacities match the fixed mapping") {
  CHECK(capacity_bps(LinkType::SatSat) == 125e6);
  CHECK(capacity_bps(LinkType::SatAir) == 112e6);
  CHECK(capacity_bps(LinkType::SatGw) == 500e6);
  CHECK(capacity_bps(LinkType::AirAir) == 45e6);
  CHECK(capacity_bps(LinkType::AirGw) == 75e6);
}

TEST_CASE("link type names round-trip") {
  for (LinkType t : {LinkType::SatSat, LinkType::SatAir, LinkType::SatGw,
                     LinkType::AirAir, LinkType::AirGw}) {
    const auto back = link_type_from_name(link_type_name(t));
    REQUIRE(back.has_value());
    CHECK(*back == t);
  }
  CHECK_FALSE(link_type_from_name("bogus").has_value());
}

TEST_CASE("select_isls single plane of four is a ring") {
  geom::OrbitShell shell;
  shell.plane_count = 1;
  shell.sats_per_plane = 4;
  const auto isls = select_isls(shell);
  CHECK(isls.size() == 4);
  for (const auto& [id, deg] : degrees(isls)) {
    (void)id;
    CHECK(deg == 2);
  }
}

TEST_CASE("select_isls 6x11: non-seam satellites have degree 4") {
  geom::OrbitShell shell;  // defaults are 6x11
  const auto isls = select_isls(shell);
  const auto deg = degrees(isls);
  for (int p = 1; p < 5; ++p)
    for (int s = 0; s < 11; ++s) CHECK(deg.at(p * 11 + s) == 4);
  for (int s = 0; s < 11; ++s) {
    CHECK(deg.at(s) == 3);           // seam plane 0
    CHECK(deg.at(5 * 11 + s) == 3);  // seam plane 5
  }
}

TEST_CASE("select_isls 2x2: degree 2 (coincident ring neighbors dedupe)") {
  geom::OrbitShell shell;
  shell.plane_count = 2;
  shell.sats_per_plane = 2;
  const auto isls = select_isls(shell);
  for (const auto& [id, deg] : degrees(isls)) {
    (void)id;
    CHECK(deg == 2);
  }
  CHECK(isls.size() == 4);
}

TEST_CASE("build_snapshot visibility links") {
  Scenario sc = tiny_scenario();
  const auto snap = build_snapshot(sc, 0);
  const auto nodes = sc.nodes();
  REQUIRE(nodes.size() == 5);  // 1 sat + 2 air + 2 gw

  // The satellite sits at (r,0,0): radially above gateway "under" (id 3).
  bool found_satgw = false, found_airair = false;
  int gw_far_links = 0, gw_gw_links = 0;
  for (const auto& l : snap.links) {
    CHECK(l.capacity == capacity_bps(l.type));
    CHECK(l.a < l.b);
    CHECK(snap.positions[l.a].has_value());
    CHECK(snap.positions[l.b].has_value());
    if (l.a == 0 && l.b == 3) {
      found_satgw = true;
      CHECK(l.type == LinkType::SatGw);
      CHECK(l.distance_m == doctest::Approx(781'000.0).epsilon(1e-6));
      CHECK(l.capacity == 500e6);
    }
    if (l.a == 1 && l.b == 2) {
      found_airair = true;
      CHECK(l.type == LinkType::AirAir);
      CHECK(l.capacity == 45e6);
    }
    if (l.b == 4) ++gw_far_links;
    if (nodes[l.a].cls == NodeClass::Gateway &&
        nodes[l.b].cls == NodeClass::Gateway)
      ++gw_gw_links;
  }
  CHECK(found_satgw);
  CHECK(found_airair);  // aircraft start ~220 km apart, within 400 km range
  // The far-side gateway sees nothing at t=0.
  CHECK(gw_far_links == 0);
  CHECK(gw_gw_links == 0);
}

TEST_CASE("build_snapshot excludes aircraft not airborne") {
  Scenario sc = tiny_scenario();
  sc.flights[1].route.departure_s = 1000.0;  // not yet departed at t=0
  const auto snap = build_snapshot(sc, 0);
  CHECK_FALSE(snap.positions[2].has_value());
  for (const auto& l : snap.links) {
    CHECK(l.a != 2);
    CHECK(l.b != 2);
  }
}

TEST_CASE("build_snapshot is pure") {
  Scenario sc = tiny_scenario();
  std::ostringstream a, b;
  write_snapshot(a, sc, build_snapshot(sc, 1));
  write_snapshot(b, sc, build_snapshot(sc, 1));
  CHECK(a.str() == b.str());
}

TEST_CASE("snapshot_series length and jobs invariance") {
  Scenario sc = tiny_scenario();
  sc.horizon_s = 4.0 * 3600.0;
  sc.snapshot_interval_s = 300.0;
  CHECK(sc.snapshot_count() == 49);

  sc.horizon_s = 300.0;
  CHECK(sc.snapshot_count() == 2);

  sc.horizon_s = 1800.0;
  const auto serial = snapshot_series(sc, 1);
  const auto parallel = snapshot_series(sc, 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    std::ostringstream a, b;
    write_snapshot(a, sc, serial[i]);
    write_snapshot(b, sc, parallel[i]);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("assign_mec_aircraft sampling") {
  Scenario sc = tiny_scenario();
  sc.flights.clear();
  for (int i = 0; i < 20; ++i) {
    FlightSpec f{"f" + std::to_string(i), {}, 180.0};
    f.route.origin = {0.0, static_cast<double>(i), 0.0};
    f.route.destination = {10.0, static_cast<double>(i) + 20.0, 0.0};
    sc.flights.push_back(f);
  }
  sc.rng_seed = 7;

  CHECK(assign_mec_aircraft(sc, 0.0).empty());
  CHECK(assign_mec_aircraft(sc, 1.0).size() == 20);

  const auto fifth = assign_mec_aircraft(sc, 0.2);
  CHECK(fifth.size() == 4);
  CHECK(fifth == assign_mec_aircraft(sc, 0.2));  // reproducible

  const auto two_fifths = assign_mec_aircraft(sc, 0.4);
  CHECK(two_fifths.size() == 8);
  for (NodeId id : fifth) {
    CHECK(std::find(two_fifths.begin(), two_fifths.end(), id) !=
          two_fifths.end());  // nested prefixes
  }

  CHECK_THROWS_WITH_AS(assign_mec_aircraft(sc, 1.2),
                       "mec_aircraft_ratio out of [0,1]",
                       std::invalid_argument);
}

TEST_CASE("node ordering is satellites, aircraft, gateways") {
  const Scenario sc = tiny_scenario();
  const auto nodes = sc.nodes();
  CHECK(nodes[0].cls == NodeClass::Satellite);
  CHECK(nodes[1].cls == NodeClass::Aircraft);
  CHECK(nodes[2].cls == NodeClass::Aircraft);
  CHECK(nodes[3].cls == NodeClass::Gateway);
  CHECK(nodes[4].cls == NodeClass::Gateway);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    CHECK(nodes[i].id == static_cast<NodeId>(i));
  CHECK(nodes[3].has_mec);
  CHECK(nodes[4].has_mec);
}
