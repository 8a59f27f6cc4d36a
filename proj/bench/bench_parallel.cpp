// Serial vs parallel snapshot processing. The parallel path distributes
// independent snapshots over OpenMP threads; outputs are identical by
// construction, so this only measures throughput.

#include <benchmark/benchmark.h>

#include "aamec/experiments.hpp"
#include "aamec/topology.hpp"

using namespace aamec;

namespace {

topo::Scenario bench_scenario() {
  topo::Scenario sc;
  sc.shell.plane_count = 1;
  sc.shell.sats_per_plane = 11;
  sc.shell.inclination_deg = 0.0;
  sc.shell.raan_spacing_deg = 0.0;
  sc.gateways = {{"gw-0", {0.0, 0.0, 0.0}},
                 {"gw-90", {0.0, 90.0, 0.0}},
                 {"gw-180", {0.0, 180.0, 0.0}},
                 {"gw-270", {0.0, -90.0, 0.0}}};
  for (int i = 0; i < 6; ++i) {
    topo::FlightSpec f;
    f.name = "fl" + std::to_string(i);
    const double lon0 = -90.0 + 30.0 * i;
    f.route.origin = {1.0, lon0, 0.0};
    f.route.destination = {-1.0, lon0 + 20.0, 0.0};
    f.passengers = 150.0;
    sc.flights.push_back(f);
  }
  sc.horizon_s = 3'600.0;
  sc.snapshot_interval_s = 300.0;
  sc.rng_seed = 7;
  sc.mec_aircraft_ratio = 0.2;
  return sc;
}

void BM_SnapshotSeries(benchmark::State& state) {
  const auto sc = bench_scenario();
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto series = topo::snapshot_series(sc, jobs);
    benchmark::DoNotOptimize(series);
  }
}

void BM_DynamicRun(benchmark::State& state) {
  const auto sc = bench_scenario();
  exp::SolveOptions options;
  options.jobs = static_cast<int>(state.range(0));
  const auto uc = state.range(1) == 0 ? opt::UseCase::Airborne
                                      : opt::UseCase::Offload;
  for (auto _ : state) {
    auto run = exp::run_dynamic(sc, uc, options);
    benchmark::DoNotOptimize(run);
  }
}

}  // namespace

BENCHMARK(BM_SnapshotSeries)->Arg(1)->Arg(2)->Arg(4)->Unit(
    benchmark::kMillisecond);
BENCHMARK(BM_DynamicRun)
    ->Args({1, 0})
    ->Args({4, 0})
    ->Args({1, 1})
    ->Args({4, 1})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
