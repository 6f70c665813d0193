#include <benchmark/benchmark.h>

#include "gcnet/discover.hpp"

namespace {

void DiscoverSimulated(benchmark::State& state) {
  gcnet::RunConfig config;
  config.simulate = true;
  config.sim.n = static_cast<int>(state.range(0));
  config.sim.t = 200;
  config.b_draws = 100;
  config.seed = 31337;
  config.thread_budget = 1;
  for (auto _ : state) {
    const gcnet::DiscoverReport report = gcnet::run_discover(config);
    benchmark::DoNotOptimize(report.outputs.size());
  }
}
BENCHMARK(DiscoverSimulated)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BootstrapNullDraws(benchmark::State& state) {
  gcnet::RunConfig config;
  config.simulate = true;
  config.sim.n = 30;
  config.sim.t = 200;
  config.b_draws = static_cast<int>(state.range(0));
  config.seed = 31337;
  config.thread_budget = 1;
  config.procedure = gcnet::ProcedureChoice::Bootstrap;
  for (auto _ : state) {
    const gcnet::DiscoverReport report = gcnet::run_discover(config);
    benchmark::DoNotOptimize(report.outputs.size());
  }
}
BENCHMARK(BootstrapNullDraws)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
