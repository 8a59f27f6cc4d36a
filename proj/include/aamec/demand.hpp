#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "aamec/rng.hpp"

// Flow demands for in-flight services and satellite computational workloads.
// Units: bits, bits/second, seconds, tasks/second.

namespace aamec::demand {

struct Service {
  std::string name;
  double bandwidth_per_user_bps = 0.0;  // B_m
  double delay_bound_s = 0.0;           // tau_m
  double utilization = 0.0;             // U_m, in (0, 1]
  double packet_bits = 0.0;             // P_m
};

// Web, Online Gaming, VoIP, Video Streaming with their default requirements.
const std::vector<Service>& default_services();

struct Flow {
  std::uint32_t id = 0;
  std::uint32_t source = 0;      // aircraft node id
  std::string service;
  double demand_bps = 0.0;       // D = B_m * U_m * N_a * rho_a
  double packet_bits = 0.0;
  double delay_bound_s = 0.0;
};

struct TaskModel {
  double instructions_per_task = 25e6;   // I
  double bits_per_task = 1.6e6;          // D_T = 0.2 MB (decimal)
  double deadline_s = 1.0;               // tau_s
};

struct ProcessorSpec {
  std::string name;
  double freq_hz = 0.0;
  double ipc = 0.0;
  int cores = 0;

  double mips() const { return freq_hz * ipc * cores / 1e6; }
  double task_capacity(const TaskModel& tm) const {
    return std::floor(mips() * 1e6 / tm.instructions_per_task);
  }
};

ProcessorSpec cortex_a8();    // satellite on-board processor
ProcessorSpec cortex_a73();   // MEC server processor

struct SatTaskLoad {
  std::uint32_t satellite = 0;
  double lambda = 0.0;            // tasks/s
  std::uint64_t arrivals = 0;     // J_s
  double offloaded_tasks = 0.0;   // O_s = max(J_s - C_s, 0)
  double offload_bandwidth_bps = 0.0;  // O^B_s = D_T * O_s / tau_s
};

struct PassengerModel {
  double service_ratio = 0.2;  // rho_a
};

double flow_demand(double passengers, double service_ratio,
                   const Service& service);

struct AircraftDemand {
  std::uint32_t node = 0;
  double passengers = 0.0;  // N_a
};

std::vector<Flow> build_flows(const std::vector<AircraftDemand>& aircraft,
                              const std::vector<Service>& services,
                              double service_ratio);

// J_s for one satellite at one snapshot, keyed so results do not depend on
// evaluation order.
std::uint64_t sample_task_arrivals(double lambda, std::uint64_t run_seed,
                                   std::uint64_t satellite_id,
                                   std::uint64_t snapshot_index);

SatTaskLoad offload_load(std::uint32_t satellite, double lambda,
                         std::uint64_t arrivals, double capacity_tasks,
                         const TaskModel& tm);

// Time a MEC server needs to process O_s offloaded tasks.
double mec_compute_latency(double offloaded_tasks, const ProcessorSpec& mec,
                           const TaskModel& tm);

// Transmission time of `bits` over a link of `capacity_bps`. Throws
// std::invalid_argument on non-positive capacity (malformed topology).
double transmission_latency(double bits, double capacity_bps);

struct LinkLatency {
  double flow_s = 0.0;    // D/B + 2 d/c
  double packet_s = 0.0;  // P/B + 2 d/c
};

LinkLatency link_total_latency(double demand_bits, double packet_bits,
                               double distance_m, double capacity_bps);

}  // namespace aamec::demand
