#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

// Spherical-Earth geometry and kinematics: satellite, aircraft and gateway
// positions over time, distances, line-of-sight and propagation latency.
// All units SI: meters, seconds, radians internally (degrees at the API
// boundary where noted).

namespace aamec::geom {

inline constexpr double kSpeedOfLight = 299'792'458.0;      // m/s
inline constexpr double kEarthRadius = 6'371'000.0;         // m, spherical
inline constexpr double kEarthMu = 3.986004418e14;          // m^3/s^2
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double d) { return d * kPi / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

struct EcefPosition {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline EcefPosition operator-(const EcefPosition& a, const EcefPosition& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline EcefPosition operator+(const EcefPosition& a, const EcefPosition& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline EcefPosition operator*(double s, const EcefPosition& a) {
  return {s * a.x, s * a.y, s * a.z};
}
inline double dot(const EcefPosition& a, const EcefPosition& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

struct GeodeticPoint {
  double latitude_deg = 0.0;   // [-90, 90]
  double longitude_deg = 0.0;  // (-180, 180]
  double altitude_m = 0.0;     // >= 0

  bool valid() const {
    return latitude_deg >= -90.0 && latitude_deg <= 90.0 &&
           longitude_deg > -180.0 && longitude_deg <= 180.0 &&
           altitude_m >= 0.0 && std::isfinite(altitude_m);
  }
};

// Circular Walker-style shell. plane_count * sats_per_plane satellites on
// circular orbits of radius kEarthRadius + altitude_m.
struct OrbitShell {
  int plane_count = 6;
  int sats_per_plane = 11;
  double altitude_m = 781'000.0;
  double inclination_deg = 86.4;
  double raan_spacing_deg = 30.0;
  double phase_offset_deg = 0.0;
  double epoch_s = 0.0;

  int total_satellites() const { return plane_count * sats_per_plane; }
  double orbit_radius() const { return kEarthRadius + altitude_m; }
  double angular_rate() const {
    const double r = orbit_radius();
    return std::sqrt(kEarthMu / (r * r * r));
  }
  double period() const { return 2.0 * kPi / angular_rate(); }
};

// Fixed-speed great-circle flight at a single cruise altitude.
struct FlightRoute {
  GeodeticPoint origin;
  GeodeticPoint destination;
  double cruise_altitude_m = 11'000.0;
  double departure_s = 0.0;
  double speed_mps = 250.0;

  double arc_angle_rad() const;            // geocentric origin->destination
  double flight_duration_s() const;        // at cruise radius
};

EcefPosition geodetic_to_ecef(const GeodeticPoint& p);

// Position of satellite (plane, slot) at time t. Throws std::out_of_range on
// bad indices.
EcefPosition propagate_satellite(const OrbitShell& shell, int plane, int slot,
                                 double t);

// nullopt before departure or after arrival.
std::optional<EcefPosition> propagate_aircraft(const FlightRoute& route,
                                               double t);

double distance(const EcefPosition& a, const EcefPosition& b);

// True iff the open interior of segment a-b keeps at least
// kEarthRadius + clearance_altitude_m from the Earth's center.
bool line_of_sight(const EcefPosition& a, const EcefPosition& b,
                   double clearance_altitude_m);

// Angle of `sky` above the local horizontal plane at `ground`, degrees.
double elevation_angle_deg(const EcefPosition& ground,
                           const EcefPosition& sky);

inline double propagation_latency(double distance_m) {
  return distance_m / kSpeedOfLight;
}

}  // namespace aamec::geom
