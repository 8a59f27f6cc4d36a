#include <doctest.h>

#include <stdexcept>

#include "aamec/demand.hpp"

using namespace aamec;
using namespace aamec::demand;

namespace {

const Service& service(const char* name) {
  for (const auto& s : default_services())
    if (s.name == name) return s;
  throw std::logic_error("unknown service in test");
}

}  // namespace

TEST_CASE("default service table") {
  const auto& services = default_services();
  REQUIRE(services.size() == 4);

  const auto& web = service("Web Service");
  CHECK(web.bandwidth_per_user_bps == 100e3);
  CHECK(web.delay_bound_s == 0.5);
  CHECK(web.utilization == 0.14);
  CHECK(web.packet_bits == 933.0 * 8.0);

  const auto& gaming = service("Online Gaming");
  CHECK(gaming.bandwidth_per_user_bps == 50e3);
  CHECK(gaming.delay_bound_s == 0.06);
  CHECK(gaming.utilization == 0.04);
  CHECK(gaming.packet_bits == 192.0);  // 24 B

  const auto& voip = service("VoIP");
  CHECK(voip.bandwidth_per_user_bps == 64e3);
  CHECK(voip.delay_bound_s == 0.1);
  CHECK(voip.utilization == 0.15);
  CHECK(voip.packet_bits == 829.0 * 8.0);

  const auto& video = service("Video Streaming");
  CHECK(video.bandwidth_per_user_bps == 1.5e6);
  CHECK(video.delay_bound_s == 0.3);
  CHECK(video.utilization == 0.67);
  CHECK(video.packet_bits == 1378.0 * 8.0);
}

TEST_CASE("flow_demand") {
  CHECK(flow_demand(180.0, 0.2, service("Web Service")) == doctest::Approx(504e3));
  CHECK(flow_demand(0.0, 0.2, service("VoIP")) == 0.0);
  CHECK(flow_demand(853.0, 0.2, service("Video Streaming")) ==
        doctest::Approx(171.453e6).epsilon(1e-9));
  // Linear in N_a.
  CHECK(flow_demand(360.0, 0.2, service("Web Service")) ==
        doctest::Approx(2.0 * flow_demand(180.0, 0.2, service("Web Service"))));
}

TEST_CASE("build_flows cardinality and fields") {
  std::vector<AircraftDemand> aircraft;
  for (std::uint32_t i = 0; i < 10; ++i) aircraft.push_back({100 + i, 180.0});
  const auto flows = build_flows(aircraft, default_services(), 0.2);
  REQUIRE(flows.size() == 40);

  int gaming_count = 0;
  for (const auto& f : flows) {
    if (f.service == "Online Gaming") {
      ++gaming_count;
      CHECK(f.delay_bound_s == doctest::Approx(0.06));
      CHECK(f.packet_bits == 192.0);
    }
  }
  CHECK(gaming_count == 10);

  // Equal passenger counts give equal demands per service.
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(flows[i].demand_bps == flows[4 + i].demand_bps);

  // Stable unique ids.
  for (std::size_t i = 0; i < flows.size(); ++i)
    CHECK(flows[i].id == static_cast<std::uint32_t>(i));
}

TEST_CASE("processor capacities recompute exactly") {
  const TaskModel tm;
  const auto a8 = cortex_a8();
  CHECK(a8.mips() == doctest::Approx(2000.0));
  CHECK(a8.task_capacity(tm) == 80.0);

  const auto a73 = cortex_a73();
  CHECK(a73.mips() == doctest::Approx(71'120.0));
  CHECK(a73.task_capacity(tm) == 2844.0);

  auto doubled = a8;
  doubled.freq_hz *= 2.0;
  CHECK(doubled.mips() == doctest::Approx(2.0 * a8.mips()));
}

TEST_CASE("sample_task_arrivals is keyed") {
  const auto a = sample_task_arrivals(80.0, 1, 5, 3);
  CHECK(a == sample_task_arrivals(80.0, 1, 5, 3));
  // Different keys give (overwhelmingly) different draws across a window.
  bool differs = false;
  for (std::uint64_t snap = 0; snap < 32; ++snap) {
    if (sample_task_arrivals(80.0, 1, 5, snap) !=
        sample_task_arrivals(80.0, 2, 5, snap))
      differs = true;
  }
  CHECK(differs);
}

TEST_CASE("offload_load clamps and converts") {
  const TaskModel tm;
  const auto over = offload_load(0, 80.0, 100, 80.0, tm);
  CHECK(over.offloaded_tasks == 20.0);
  CHECK(over.offload_bandwidth_bps == doctest::Approx(32e6));

  CHECK(offload_load(0, 80.0, 80, 80.0, tm).offloaded_tasks == 0.0);
  CHECK(offload_load(0, 80.0, 80, 80.0, tm).offload_bandwidth_bps == 0.0);
  CHECK(offload_load(0, 80.0, 50, 80.0, tm).offloaded_tasks == 0.0);
}

TEST_CASE("mec_compute_latency") {
  const TaskModel tm;
  const auto a73 = cortex_a73();
  CHECK(mec_compute_latency(0.0, a73, tm) == 0.0);
  CHECK(mec_compute_latency(20.0, a73, tm) ==
        doctest::Approx(7.031e-3).epsilon(1e-3));
  CHECK(mec_compute_latency(2844.0, a73, tm) ==
        doctest::Approx(0.99986).epsilon(1e-4));
}

TEST_CASE("transmission and total link latencies") {
  CHECK(transmission_latency(504e3, 45e6) == doctest::Approx(0.0112));
  CHECK(transmission_latency(192.0, 75e6) == doctest::Approx(2.56e-6));
  CHECK(transmission_latency(45e6, 45e6) == doctest::Approx(1.0));
  CHECK_THROWS_AS(transmission_latency(100.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(transmission_latency(100.0, -5.0), std::invalid_argument);

  const auto lat = link_total_latency(504e3, 192.0, 1'000'000.0, 112e6);
  CHECK(lat.flow_s == doctest::Approx(504e3 / 112e6 + 2e6 / 2.99792458e8));
  CHECK(lat.packet_s == doctest::Approx(192.0 / 112e6 + 2e6 / 2.99792458e8));
  CHECK(lat.flow_s >= lat.packet_s);  // D >= P on the same link
}
