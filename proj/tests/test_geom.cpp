#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "aamec/geom.hpp"
#include "aamec/rng.hpp"

using namespace aamec;
using namespace aamec::geom;

TEST_CASE("geodetic_to_ecef axis cases") {
  const auto origin = geodetic_to_ecef({0.0, 0.0, 0.0});
  CHECK(origin.x == doctest::Approx(kEarthRadius).epsilon(1e-12));
  CHECK(origin.y == doctest::Approx(0.0).scale(1.0));
  CHECK(origin.z == doctest::Approx(0.0).scale(1.0));

  const auto pole = geodetic_to_ecef({90.0, 0.0, 0.0});
  CHECK(pole.z == doctest::Approx(kEarthRadius).epsilon(1e-12));
  CHECK(std::hypot(pole.x, pole.y) < 1e-6);
}

TEST_CASE("geodetic_to_ecef matches spherical trig for Rome") {
  const GeodeticPoint rome{41.9, 12.483, 0.0};
  const auto p = geodetic_to_ecef(rome);
  const double phi = deg2rad(41.9), lam = deg2rad(12.483);
  CHECK(p.x == doctest::Approx(kEarthRadius * std::cos(phi) * std::cos(lam)));
  CHECK(p.y == doctest::Approx(kEarthRadius * std::cos(phi) * std::sin(lam)));
  CHECK(p.z == doctest::Approx(kEarthRadius * std::sin(phi)));
  CHECK(p.norm() == doctest::Approx(kEarthRadius).epsilon(1e-12));
}

TEST_CASE("propagate_satellite epoch and periodicity") {
  OrbitShell shell;
  shell.plane_count = 1;
  shell.sats_per_plane = 11;
  shell.inclination_deg = 90.0;
  shell.raan_spacing_deg = 0.0;

  const auto p0 = propagate_satellite(shell, 0, 0, 0.0);
  CHECK(p0.norm() == doctest::Approx(7'152'000.0).epsilon(1e-12));
  CHECK(std::fabs(p0.y) < 1e-6);  // 90 deg inclination, RAAN 0: x-z plane

  const double period = shell.period();
  // 2*pi*sqrt(r^3/mu) at r = 7,152 km, about 100 minutes.
  CHECK(period == doctest::Approx(6019.4).epsilon(1e-3));
  const auto p1 = propagate_satellite(shell, 0, 0, period);
  CHECK(distance(p0, p1) < 1e-6);
}

TEST_CASE("same-plane adjacent slots keep their angular separation") {
  OrbitShell shell;
  shell.plane_count = 1;
  shell.sats_per_plane = 11;
  for (double t : {0.0, 100.0, 1234.5, 5000.0}) {
    const auto a = propagate_satellite(shell, 0, 3, t);
    const auto b = propagate_satellite(shell, 0, 4, t);
    const double cosang = dot(a, b) / (a.norm() * b.norm());
    CHECK(std::acos(cosang) ==
          doctest::Approx(2.0 * kPi / 11.0).epsilon(1e-9));
  }
}

TEST_CASE("propagate_satellite radius stays constant over many steps") {
  OrbitShell shell;  // default 6x11
  const double r = shell.orbit_radius();
  for (int i = 0; i < 10'000; ++i) {
    const auto p = propagate_satellite(shell, 2, 5, i * 17.3);
    CHECK(std::fabs(p.norm() - r) / r < 1e-6);
  }
}

TEST_CASE("propagate_satellite rejects bad indices") {
  OrbitShell shell;
  CHECK_THROWS_AS(propagate_satellite(shell, 6, 0, 0.0), std::out_of_range);
  CHECK_THROWS_AS(propagate_satellite(shell, 0, 11, 0.0), std::out_of_range);
  CHECK_THROWS_AS(propagate_satellite(shell, -1, 0, 0.0), std::out_of_range);
}

TEST_CASE("propagate_aircraft boundaries and midpoint") {
  FlightRoute route;
  route.origin = {0.0, 0.0, 0.0};
  route.destination = {0.0, 90.0, 0.0};
  route.departure_s = 600.0;

  CHECK_FALSE(propagate_aircraft(route, 0.0).has_value());
  CHECK_FALSE(propagate_aircraft(route, 599.9).has_value());

  const auto at_departure = propagate_aircraft(route, 600.0);
  REQUIRE(at_departure.has_value());
  const auto lifted = geodetic_to_ecef({0.0, 0.0, route.cruise_altitude_m});
  CHECK(distance(*at_departure, lifted) < 1e-6);

  const double mid_t = route.departure_s + route.flight_duration_s() / 2.0;
  const auto mid = propagate_aircraft(route, mid_t);
  REQUIRE(mid.has_value());
  const auto expect = geodetic_to_ecef({0.0, 45.0, route.cruise_altitude_m});
  CHECK(distance(*mid, expect) < 1e-3);

  CHECK_FALSE(
      propagate_aircraft(route, route.departure_s +
                                    route.flight_duration_s() + 1.0)
          .has_value());
}

TEST_CASE("distance examples and properties") {
  CHECK(distance({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(distance({kEarthRadius, 0, 0}, {0, kEarthRadius, 0}) ==
        doctest::Approx(kEarthRadius * std::sqrt(2.0)).epsilon(1e-12));
  // Gateway directly under a satellite at 781 km.
  CHECK(distance({kEarthRadius, 0, 0}, {kEarthRadius + 781'000.0, 0, 0}) ==
        doctest::Approx(781'000.0));

  auto s = rng::Stream::keyed(7, 1);
  for (int i = 0; i < 200; ++i) {
    const EcefPosition a{s.next_double() * 1e7, s.next_double() * 1e7,
                         s.next_double() * 1e7};
    const EcefPosition b{s.next_double() * 1e7, s.next_double() * 1e7,
                         s.next_double() * 1e7};
    const EcefPosition c{s.next_double() * 1e7, s.next_double() * 1e7,
                         s.next_double() * 1e7};
    CHECK(distance(a, b) == distance(b, a));
    CHECK(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-6);
  }
}

TEST_CASE("line_of_sight") {
  const double r = 7'152'000.0;
  CHECK_FALSE(line_of_sight({r, 0, 0}, {-r, 0, 0}, 80'000.0));
  CHECK(line_of_sight({kEarthRadius, 0, 0}, {kEarthRadius + 781'000.0, 0, 0},
                      80'000.0));

  // Adjacent same-plane satellites, 32.7 degrees apart: the chord midpoint
  // sits at r*cos(16.36 deg) ~ 6862 km > 6451 km clearance shell.
  const double half = deg2rad(32.7 / 2.0);
  const EcefPosition a{r * std::cos(half), r * std::sin(half), 0.0};
  const EcefPosition b{r * std::cos(half), -r * std::sin(half), 0.0};
  CHECK(line_of_sight(a, b, 80'000.0));

  auto s = rng::Stream::keyed(7, 2);
  for (int i = 0; i < 200; ++i) {
    const EcefPosition p{(s.next_double() - 0.5) * 2e7,
                         (s.next_double() - 0.5) * 2e7,
                         (s.next_double() - 0.5) * 2e7};
    const EcefPosition q{(s.next_double() - 0.5) * 2e7,
                         (s.next_double() - 0.5) * 2e7,
                         (s.next_double() - 0.5) * 2e7};
    CHECK(line_of_sight(p, q, 80'000.0) == line_of_sight(q, p, 80'000.0));
  }
}

TEST_CASE("elevation_angle") {
  const EcefPosition ground{kEarthRadius, 0, 0};
  CHECK(elevation_angle_deg(ground, {kEarthRadius + 781'000.0, 0, 0}) ==
        doctest::Approx(90.0));
  CHECK(elevation_angle_deg(ground, {kEarthRadius, 500'000.0, 0}) ==
        doctest::Approx(0.0).scale(1.0));

  // 20 degrees geocentric separation at 781 km altitude; planar oracle via
  // the triangle (center, ground, satellite).
  const double sep = deg2rad(20.0);
  const double rs = kEarthRadius + 781'000.0;
  const EcefPosition sat{rs * std::cos(sep), rs * std::sin(sep), 0.0};
  const double dx = sat.x - ground.x, dy = sat.y - ground.y;
  const double range = std::hypot(dx, dy);
  const double oracle =
      rad2deg(std::asin((rs * std::cos(sep) - kEarthRadius) / range));
  CHECK(elevation_angle_deg(ground, sat) == doctest::Approx(oracle));

  // Monotone decreasing in separation at fixed altitudes.
  double prev = 91.0;
  for (int deg = 0; deg <= 60; deg += 5) {
    const double a = deg2rad(deg);
    const EcefPosition sky{rs * std::cos(a), rs * std::sin(a), 0.0};
    const double e = elevation_angle_deg(ground, sky);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("propagation_latency") {
  CHECK(propagation_latency(0.0) == 0.0);
  CHECK(propagation_latency(781'000.0) ==
        doctest::Approx(2.6051e-3).epsilon(1e-4));
  CHECK(propagation_latency(2'000'000.0) ==
        doctest::Approx(6.6713e-3).epsilon(1e-4));
  CHECK(propagation_latency(3.0 * 1234.0) ==
        doctest::Approx(3.0 * propagation_latency(1234.0)));
}
