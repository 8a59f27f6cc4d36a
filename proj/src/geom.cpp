#include "aamec/geom.hpp"

#include <algorithm>
#include <stdexcept>

namespace aamec::geom {

EcefPosition geodetic_to_ecef(const GeodeticPoint& p) {
  const double r = kEarthRadius + p.altitude_m;
  const double phi = deg2rad(p.latitude_deg);
  const double lam = deg2rad(p.longitude_deg);
  return {r * std::cos(phi) * std::cos(lam),
          r * std::cos(phi) * std::sin(lam),
          r * std::sin(phi)};
}

EcefPosition propagate_satellite(const OrbitShell& shell, int plane, int slot,
                                 double t) {
  if (plane < 0 || plane >= shell.plane_count)
    throw std::out_of_range("propagate_satellite: plane index");
  if (slot < 0 || slot >= shell.sats_per_plane)
    throw std::out_of_range("propagate_satellite: slot index");

  const double r = shell.orbit_radius();
  const double raan = deg2rad(plane * shell.raan_spacing_deg);
  const double u0 = deg2rad(slot * 360.0 / shell.sats_per_plane +
                            plane * shell.phase_offset_deg);
  const double u = u0 + shell.angular_rate() * (t - shell.epoch_s);
  const double inc = deg2rad(shell.inclination_deg);

  const double cu = std::cos(u), su = std::sin(u);
  const double co = std::cos(raan), so = std::sin(raan);
  const double ci = std::cos(inc), si = std::sin(inc);
  return {r * (co * cu - so * su * ci),
          r * (so * cu + co * su * ci),
          r * (su * si)};
}

double FlightRoute::arc_angle_rad() const {
  GeodeticPoint a = origin, b = destination;
  a.altitude_m = 0.0;
  b.altitude_m = 0.0;
  const EcefPosition pa = geodetic_to_ecef(a);
  const EcefPosition pb = geodetic_to_ecef(b);
  const double c = std::clamp(dot(pa, pb) / (pa.norm() * pb.norm()), -1.0, 1.0);
  return std::acos(c);
}

double FlightRoute::flight_duration_s() const {
  const double radius = kEarthRadius + cruise_altitude_m;
  return arc_angle_rad() * radius / speed_mps;
}

std::optional<EcefPosition> propagate_aircraft(const FlightRoute& route,
                                               double t) {
  if (t < route.departure_s) return std::nullopt;
  const double sigma = route.arc_angle_rad();
  const double radius = kEarthRadius + route.cruise_altitude_m;
  const double travelled = route.speed_mps * (t - route.departure_s);
  const double total = sigma * radius;
  if (travelled > total) return std::nullopt;

  GeodeticPoint a = route.origin, b = route.destination;
  a.altitude_m = 0.0;
  b.altitude_m = 0.0;
  EcefPosition pa = geodetic_to_ecef(a);
  EcefPosition pb = geodetic_to_ecef(b);
  pa = (1.0 / pa.norm()) * pa;
  pb = (1.0 / pb.norm()) * pb;

  const double f = total > 0.0 ? travelled / total : 0.0;
  EcefPosition unit;
  if (sigma < 1e-12) {
    unit = pa;
  } else {
    const double w0 = std::sin((1.0 - f) * sigma) / std::sin(sigma);
    const double w1 = std::sin(f * sigma) / std::sin(sigma);
    unit = w0 * pa + w1 * pb;
    unit = (1.0 / unit.norm()) * unit;
  }
  return radius * unit;
}

double distance(const EcefPosition& a, const EcefPosition& b) {
  return (a - b).norm();
}

bool line_of_sight(const EcefPosition& a, const EcefPosition& b,
                   double clearance_altitude_m) {
  const EcefPosition ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return true;
  // Closest approach of the segment's supporting line to the origin.
  const double tstar = -dot(a, ab) / len2;
  if (tstar <= 0.0 || tstar >= 1.0) return true;  // interior never dips
  const EcefPosition closest = a + tstar * ab;
  // Endpoints that sit below the clearance shell (aircraft, gateways) are
  // exempt from the clearance requirement; only Earth blockage counts then.
  double required = kEarthRadius + clearance_altitude_m;
  if (std::min(a.norm(), b.norm()) < required) required = kEarthRadius;
  return closest.norm() >= required;
}

double elevation_angle_deg(const EcefPosition& ground,
                           const EcefPosition& sky) {
  const EcefPosition up = (1.0 / ground.norm()) * ground;
  const EcefPosition d = sky - ground;
  const double dn = d.norm();
  if (dn == 0.0) return 90.0;
  const double s = std::clamp(dot(d, up) / dn, -1.0, 1.0);
  return rad2deg(std::asin(s));
}

}  // namespace aamec::geom
