#include "aamec/demand.hpp"

#include <cmath>
#include <stdexcept>

#include "aamec/geom.hpp"

namespace aamec::demand {

const std::vector<Service>& default_services() {
  static const std::vector<Service> services = {
      {"Web Service", 100e3, 0.500, 0.14, 933 * 8.0},
      {"Online Gaming", 50e3, 0.060, 0.04, 24 * 8.0},
      {"VoIP", 64e3, 0.100, 0.15, 829 * 8.0},
      {"Video Streaming", 1.5e6, 0.300, 0.67, 1378 * 8.0},
  };
  return services;
}

ProcessorSpec cortex_a8() { return {"ARM Cortex-A8", 1e9, 2.0, 1}; }
ProcessorSpec cortex_a73() { return {"ARM Cortex-A73", 2.8e9, 6.35, 4}; }

double flow_demand(double passengers, double service_ratio,
                   const Service& service) {
  return service.bandwidth_per_user_bps * service.utilization * passengers *
         service_ratio;
}

std::vector<Flow> build_flows(const std::vector<AircraftDemand>& aircraft,
                              const std::vector<Service>& services,
                              double service_ratio) {
  std::vector<Flow> flows;
  flows.reserve(aircraft.size() * services.size());
  std::uint32_t id = 0;
  for (const auto& a : aircraft) {
    for (const auto& s : services) {
      Flow f;
      f.id = id++;
      f.source = a.node;
      f.service = s.name;
      f.demand_bps = flow_demand(a.passengers, service_ratio, s);
      f.packet_bits = s.packet_bits;
      f.delay_bound_s = s.delay_bound_s;
      flows.push_back(f);
    }
  }
  return flows;
}

std::uint64_t sample_task_arrivals(double lambda, std::uint64_t run_seed,
                                   std::uint64_t satellite_id,
                                   std::uint64_t snapshot_index) {
  auto stream = rng::Stream::keyed(run_seed, 0x7461736bULL, satellite_id,
                                   snapshot_index);
  return rng::poisson(stream, lambda);
}

SatTaskLoad offload_load(std::uint32_t satellite, double lambda,
                         std::uint64_t arrivals, double capacity_tasks,
                         const TaskModel& tm) {
  SatTaskLoad load;
  load.satellite = satellite;
  load.lambda = lambda;
  load.arrivals = arrivals;
  load.offloaded_tasks =
      std::max(static_cast<double>(arrivals) - capacity_tasks, 0.0);
  load.offload_bandwidth_bps =
      tm.bits_per_task * load.offloaded_tasks / tm.deadline_s;
  return load;
}

double mec_compute_latency(double offloaded_tasks, const ProcessorSpec& mec,
                           const TaskModel& tm) {
  return tm.instructions_per_task * offloaded_tasks / (mec.mips() * 1e6);
}

double transmission_latency(double bits, double capacity_bps) {
  if (capacity_bps <= 0.0)
    throw std::invalid_argument("transmission_latency: non-positive capacity");
  return bits / capacity_bps;
}

LinkLatency link_total_latency(double demand_bits, double packet_bits,
                               double distance_m, double capacity_bps) {
  const double round_trip = 2.0 * geom::propagation_latency(distance_m);
  return {transmission_latency(demand_bits, capacity_bps) + round_trip,
          transmission_latency(packet_bits, capacity_bps) + round_trip};
}

}  // namespace aamec::demand
