#include <benchmark/benchmark.h>

#include "bsl/engine.hpp"
#include "bsl/random.hpp"

namespace {

void BM_SimulateBp(benchmark::State& state) {
  const bsl::CharacteristicCouple bp{0, bsl::FamilyDescriptor::bp(1, 1)};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    bsl::SimConfig cfg;
    cfg.truncation = 1.0;
    cfg.horizon = 1.0;
    cfg.master_seed = ++seed;
    cfg.record_events = false;
    benchmark::DoNotOptimize(bsl::simulate(bp, cfg));
  }
}
BENCHMARK(BM_SimulateBp);

void BM_SimulateRiCapped(benchmark::State& state) {
  const bsl::CharacteristicCouple ri{0, bsl::FamilyDescriptor::ri(0.5, 0.5)};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    bsl::SimConfig cfg;
    cfg.truncation = 1.2;
    cfg.horizon = 2.0;
    cfg.cap = 1.2;
    cfg.master_seed = ++seed;
    cfg.record_events = false;
    benchmark::DoNotOptimize(bsl::simulate(ri, cfg));
  }
}
BENCHMARK(BM_SimulateRiCapped);

void BM_FrontTrackedMb(benchmark::State& state) {
  const bsl::CharacteristicCouple mb{0, bsl::FamilyDescriptor::mb(0.5, 2)};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    bsl::SimConfig cfg;
    cfg.truncation = 2.0;
    cfg.adaptive_barrier = true;
    cfg.window = 2.0;
    cfg.select_lowest = 500;
    cfg.horizon = 32.0;
    cfg.master_seed = ++seed;
    cfg.record_events = false;
    cfg.record_population = false;
    benchmark::DoNotOptimize(bsl::simulate(mb, cfg));
  }
}
BENCHMARK(BM_FrontTrackedMb);

}  // namespace

BENCHMARK_MAIN();
