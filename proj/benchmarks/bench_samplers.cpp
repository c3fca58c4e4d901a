#include <benchmark/benchmark.h>

#include "bsl/measures.hpp"
#include "bsl/random.hpp"
#include "bsl/sampling.hpp"

namespace {

void BM_StreamU64(benchmark::State& state) {
  bsl::RandomStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_u64());
}
BENCHMARK(BM_StreamU64);

void BM_Exponential(benchmark::State& state) {
  bsl::RandomStream rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_exponential(1.5));
}
BENCHMARK(BM_Exponential);

void BM_Poisson(benchmark::State& state) {
  bsl::RandomStream rng(3);
  const double mean = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_poisson(mean));
}
BENCHMARK(BM_Poisson)->Arg(2)->Arg(50);

void BM_StableIncrement(benchmark::State& state) {
  bsl::RandomStream rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(bsl::stable_increment(0.5, 1.0, rng));
}
BENCHMARK(BM_StableIncrement);

void BM_MbAtom(benchmark::State& state) {
  const auto couple = bsl::CharacteristicCouple{0, bsl::FamilyDescriptor::mb(0.5, 2)};
  bsl::RandomStream rng(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bsl::detail::sample_atom(couple, 1.5, rng));
  }
}
BENCHMARK(BM_MbAtom);

void BM_BranchMomentMb(benchmark::State& state) {
  const auto couple = bsl::CharacteristicCouple{0, bsl::FamilyDescriptor::mb(0.5, 2)};
  double lambda = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bsl::branch_moment(couple, 2.5, lambda));
    lambda += 1e-6;  // defeat memoization-style constant folding
  }
}
BENCHMARK(BM_BranchMomentMb);

void BM_BranchMomentRi(benchmark::State& state) {
  const auto couple = bsl::CharacteristicCouple{0, bsl::FamilyDescriptor::ri(0.5, 0.5)};
  double lambda = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bsl::branch_moment(couple, 2.5, lambda));
    lambda += 1e-6;
  }
}
BENCHMARK(BM_BranchMomentRi);

}  // namespace
