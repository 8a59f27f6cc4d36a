#include "aamec/config.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace aamec::cfg {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok) fail(where, "unknown key \"" + key + "\"");
  }
}

// "100 kbps" -> 100e3 etc. Bare numbers are already SI.
double quantity(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) fail(where, "expected number or \"<value> <unit>\"");
  const auto s = v.get<std::string>();
  std::istringstream is(s);
  double value = 0.0;
  std::string unit;
  if (!(is >> value)) fail(where, "cannot parse quantity \"" + s + "\"");
  is >> unit;
  if (unit.empty() || unit == "s" || unit == "m" || unit == "bps" ||
      unit == "deg" || unit == "mps")
    return value;
  if (unit == "ms") return value * 1e-3;
  if (unit == "min") return value * 60.0;
  if (unit == "h") return value * 3600.0;
  if (unit == "km") return value * 1e3;
  if (unit == "kbps") return value * 1e3;
  if (unit == "Mbps") return value * 1e6;
  if (unit == "Gbps") return value * 1e9;
  if (unit == "bits") return value;
  if (unit == "bytes" || unit == "B") return value * 8.0;
  if (unit == "kB") return value * 8e3;
  if (unit == "MB") return value * 8e6;
  fail(where, "unknown unit \"" + unit + "\"");
}

double get_quantity(const json& obj, const char* key, double fallback,
                    const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return quantity(obj.at(key), where + "." + key);
}

geom::GeodeticPoint point(const json& obj, const std::string& where,
                          double default_alt = 0.0) {
  reject_unknown(obj, where, {"lat_deg", "lon_deg", "altitude"});
  geom::GeodeticPoint p;
  p.latitude_deg = obj.at("lat_deg").get<double>();
  p.longitude_deg = obj.at("lon_deg").get<double>();
  p.altitude_m = get_quantity(obj, "altitude", default_alt, where);
  if (!p.valid()) fail(where, "coordinates out of range");
  return p;
}

void parse_constellation(const json& obj, geom::OrbitShell& shell) {
  reject_unknown(obj, "constellation",
                 {"planes", "sats_per_plane", "altitude", "inclination_deg",
                  "raan_spacing_deg", "phase_offset_deg"});
  shell.plane_count = obj.value("planes", shell.plane_count);
  shell.sats_per_plane = obj.value("sats_per_plane", shell.sats_per_plane);
  shell.altitude_m =
      get_quantity(obj, "altitude", shell.altitude_m, "constellation");
  shell.inclination_deg = obj.value("inclination_deg", shell.inclination_deg);
  shell.raan_spacing_deg =
      obj.value("raan_spacing_deg", shell.raan_spacing_deg);
  shell.phase_offset_deg =
      obj.value("phase_offset_deg", shell.phase_offset_deg);
  if (shell.plane_count < 1 || shell.sats_per_plane < 1)
    fail("constellation", "planes and sats_per_plane must be >= 1");
  if (shell.altitude_m <= 0.0) fail("constellation", "altitude must be > 0");
}

}  // namespace

RunConfig parse_config(std::istream& is) {
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("top level must be an object");
  reject_unknown(
      j, "config",
      {"constellation", "gateways", "flights", "services", "task_model",
       "task_lambda", "mec_aircraft_ratio", "mec_ratios", "seed", "horizon",
       "snapshot_interval", "sat_ground_mask_deg", "air_ground_mask_deg",
       "air_air_range", "los_clearance", "passenger_service_ratio",
       "solver"});

  RunConfig cfg;
  topo::Scenario& sc = cfg.scenario;

  if (j.contains("constellation"))
    parse_constellation(j.at("constellation"), sc.shell);

  if (j.contains("gateways")) {
    sc.gateways.clear();
    int i = 0;
    for (const auto& g : j.at("gateways")) {
      const std::string where = "gateways[" + std::to_string(i++) + "]";
      reject_unknown(g, where, {"name", "lat_deg", "lon_deg", "altitude"});
      topo::GatewaySpec spec;
      spec.name = g.at("name").get<std::string>();
      json loc = json::object();
      loc["lat_deg"] = g.at("lat_deg");
      loc["lon_deg"] = g.at("lon_deg");
      if (g.contains("altitude")) loc["altitude"] = g.at("altitude");
      spec.location = point(loc, where);
      sc.gateways.push_back(spec);
    }
  } else {
    sc.gateways = topo::default_gateways();
  }

  if (j.contains("flights")) {
    sc.flights.clear();
    int i = 0;
    for (const auto& f : j.at("flights")) {
      const std::string where = "flights[" + std::to_string(i++) + "]";
      reject_unknown(f, where,
                     {"name", "from", "to", "departure", "cruise_altitude",
                      "speed", "passengers"});
      topo::FlightSpec spec;
      spec.name = f.at("name").get<std::string>();
      spec.route.origin = point(f.at("from"), where + ".from");
      spec.route.destination = point(f.at("to"), where + ".to");
      spec.route.departure_s = get_quantity(f, "departure", 0.0, where);
      spec.route.cruise_altitude_m =
          get_quantity(f, "cruise_altitude", spec.route.cruise_altitude_m,
                       where);
      spec.route.speed_mps =
          get_quantity(f, "speed", spec.route.speed_mps, where);
      spec.passengers = f.value("passengers", spec.passengers);
      if (spec.passengers <= 0.0) fail(where, "passengers must be > 0");
      sc.flights.push_back(spec);
    }
  }
  if (sc.flights.empty()) fail("flights", "at least one flight is required");

  if (j.contains("services")) {
    sc.services.clear();
    int i = 0;
    for (const auto& s : j.at("services")) {
      const std::string where = "services[" + std::to_string(i++) + "]";
      reject_unknown(s, where,
                     {"name", "bandwidth", "delay_bound", "utilization",
                      "packet"});
      demand::Service svc;
      svc.name = s.at("name").get<std::string>();
      svc.bandwidth_per_user_bps =
          quantity(s.at("bandwidth"), where + ".bandwidth");
      svc.delay_bound_s = quantity(s.at("delay_bound"), where + ".delay_bound");
      svc.utilization = s.at("utilization").get<double>();
      svc.packet_bits = quantity(s.at("packet"), where + ".packet");
      if (svc.utilization <= 0.0 || svc.utilization > 1.0)
        fail(where, "utilization out of (0,1]");
      if (svc.bandwidth_per_user_bps <= 0.0 || svc.delay_bound_s <= 0.0 ||
          svc.packet_bits <= 0.0)
        fail(where, "bandwidth, delay_bound and packet must be > 0");
      sc.services.push_back(svc);
    }
    if (sc.services.empty()) fail("services", "must not be empty");
  }

  if (j.contains("task_model")) {
    const auto& t = j.at("task_model");
    reject_unknown(t, "task_model",
                   {"instructions_per_task", "task_size", "deadline"});
    sc.task_model.instructions_per_task = t.value(
        "instructions_per_task", sc.task_model.instructions_per_task);
    sc.task_model.bits_per_task =
        get_quantity(t, "task_size", sc.task_model.bits_per_task,
                     "task_model");
    sc.task_model.deadline_s =
        get_quantity(t, "deadline", sc.task_model.deadline_s, "task_model");
  }

  sc.task_lambda = j.value("task_lambda", sc.task_lambda);
  if (sc.task_lambda <= 0.0) fail("task_lambda", "must be > 0");

  sc.mec_aircraft_ratio = j.value("mec_aircraft_ratio", sc.mec_aircraft_ratio);
  if (sc.mec_aircraft_ratio < 0.0 || sc.mec_aircraft_ratio > 1.0)
    fail("mec_aircraft_ratio", "mec_aircraft_ratio out of [0,1]");

  if (j.contains("mec_ratios")) {
    cfg.mec_ratios.clear();
    for (const auto& r : j.at("mec_ratios")) {
      const double v = r.get<double>();
      if (v < 0.0 || v > 1.0)
        fail("mec_ratios", "mec_aircraft_ratio out of [0,1]");
      cfg.mec_ratios.push_back(v);
    }
  }

  sc.rng_seed = j.value("seed", sc.rng_seed);
  sc.horizon_s = get_quantity(j, "horizon", sc.horizon_s, "config");
  sc.snapshot_interval_s =
      get_quantity(j, "snapshot_interval", sc.snapshot_interval_s, "config");
  if (sc.horizon_s < 0.0 || sc.snapshot_interval_s <= 0.0)
    fail("config", "horizon must be >= 0 and snapshot_interval > 0");

  sc.sat_ground_mask_deg =
      j.value("sat_ground_mask_deg", sc.sat_ground_mask_deg);
  sc.air_ground_mask_deg =
      j.value("air_ground_mask_deg", sc.air_ground_mask_deg);
  sc.air_air_range_m =
      get_quantity(j, "air_air_range", sc.air_air_range_m, "config");
  sc.los_clearance_m =
      get_quantity(j, "los_clearance", sc.los_clearance_m, "config");

  sc.passenger_service_ratio =
      j.value("passenger_service_ratio", sc.passenger_service_ratio);
  if (sc.passenger_service_ratio <= 0.0 || sc.passenger_service_ratio > 1.0)
    fail("passenger_service_ratio", "out of (0,1]");

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    reject_unknown(s, "solver", {"node_budget", "time_budget"});
    cfg.limits.node_budget = s.value("node_budget", cfg.limits.node_budget);
    cfg.limits.time_budget_s =
        get_quantity(s, "time_budget", cfg.limits.time_budget_s, "solver");
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open scenario file: " + path);
  return parse_config(is);
}

void write_resolved(std::ostream& os, const RunConfig& config) {
  const topo::Scenario& sc = config.scenario;
  json j;
  j["constellation"] = {{"planes", sc.shell.plane_count},
                        {"sats_per_plane", sc.shell.sats_per_plane},
                        {"altitude", sc.shell.altitude_m},
                        {"inclination_deg", sc.shell.inclination_deg},
                        {"raan_spacing_deg", sc.shell.raan_spacing_deg},
                        {"phase_offset_deg", sc.shell.phase_offset_deg}};
  j["gateways"] = json::array();
  for (const auto& g : sc.gateways) {
    j["gateways"].push_back({{"name", g.name},
                             {"lat_deg", g.location.latitude_deg},
                             {"lon_deg", g.location.longitude_deg},
                             {"altitude", g.location.altitude_m}});
  }
  j["flights"] = json::array();
  for (const auto& f : sc.flights) {
    j["flights"].push_back(
        {{"name", f.name},
         {"from",
          {{"lat_deg", f.route.origin.latitude_deg},
           {"lon_deg", f.route.origin.longitude_deg}}},
         {"to",
          {{"lat_deg", f.route.destination.latitude_deg},
           {"lon_deg", f.route.destination.longitude_deg}}},
         {"departure", f.route.departure_s},
         {"cruise_altitude", f.route.cruise_altitude_m},
         {"speed", f.route.speed_mps},
         {"passengers", f.passengers}});
  }
  j["services"] = json::array();
  for (const auto& s : sc.services) {
    j["services"].push_back({{"name", s.name},
                             {"bandwidth", s.bandwidth_per_user_bps},
                             {"delay_bound", s.delay_bound_s},
                             {"utilization", s.utilization},
                             {"packet", s.packet_bits}});
  }
  j["task_model"] = {
      {"instructions_per_task", sc.task_model.instructions_per_task},
      {"task_size", sc.task_model.bits_per_task},
      {"deadline", sc.task_model.deadline_s}};
  j["task_lambda"] = sc.task_lambda;
  j["mec_aircraft_ratio"] = sc.mec_aircraft_ratio;
  j["mec_ratios"] = config.mec_ratios;
  j["seed"] = sc.rng_seed;
  j["horizon"] = sc.horizon_s;
  j["snapshot_interval"] = sc.snapshot_interval_s;
  j["sat_ground_mask_deg"] = sc.sat_ground_mask_deg;
  j["air_ground_mask_deg"] = sc.air_ground_mask_deg;
  j["air_air_range"] = sc.air_air_range_m;
  j["los_clearance"] = sc.los_clearance_m;
  j["passenger_service_ratio"] = sc.passenger_service_ratio;
  j["solver"] = {{"node_budget", config.limits.node_budget},
                 {"time_budget", config.limits.time_budget_s}};
  os << j.dump(2) << "\n";
}

}  // namespace aamec::cfg
