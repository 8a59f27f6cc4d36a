#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "aamec/optimizer.hpp"
#include "aamec/topology.hpp"

// JSON scenario configs: parsing with unit conversion (kbps/Mbps/ms/km
// accepted, converted to SI on load), strict unknown-key rejection, and a
// resolved-config writer whose output parses back to the same scenario.

namespace aamec::cfg {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  topo::Scenario scenario;
  std::vector<double> mec_ratios = {0.0, 0.2, 0.4};
  opt::SolveLimits limits;
};

// Quantity values may be JSON numbers (already SI) or strings with a unit
// suffix, e.g. "100 kbps", "500 ms", "400 km", "2 h".
RunConfig parse_config(std::istream& is);
RunConfig parse_config_file(const std::string& path);

// Fully-resolved config (defaults applied, SI numbers); round-trips through
// parse_config.
void write_resolved(std::ostream& os, const RunConfig& config);

}  // namespace aamec::cfg
