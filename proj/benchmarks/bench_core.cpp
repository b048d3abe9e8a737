#include <benchmark/benchmark.h>

#include <vector>

#include "palm_forge/increments.hpp"
#include "palm_forge/palm_engine.hpp"
#include "palm_forge/random.hpp"
#include "palm_forge/verify.hpp"

using namespace palm_forge;

namespace {

void BM_Philox(benchmark::State& state) {
  RandomStream rng(7, 1);
  for (auto _ : state) benchmark::DoNotOptimize(rng());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Philox);

void BM_SampleBrownianField(benchmark::State& state) {
  const GroupDomain real = GroupDomain::real_line();
  const IncrementSampler field = IncrementSampler::parse("brownian:sigma=0.5");
  std::vector<double> locations;
  for (int k = -int(state.range(0)); k <= int(state.range(0)); ++k) locations.push_back(k);
  std::uint64_t item = 0;
  for (auto _ : state) {
    RandomStream rng(7, 2, item++);
    benchmark::DoNotOptimize(sample_field(field, real, locations, rng));
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(locations.size()));
}
BENCHMARK(BM_SampleBrownianField)->Arg(40)->Arg(400);

void BM_PerturbPalmBatch(benchmark::State& state) {
  const GroupDomain real = GroupDomain::real_line();
  const Window window = Window::symmetric(real, 40);
  const SampleBatch palm = sample_palm_batch(PalmSource::parse("poisson:lambda=2"), window,
                                             std::size_t(state.range(0)), RandomStream(7, 3));
  const IncrementSampler field = IncrementSampler::parse("brownian:sigma=0.5");
  for (auto _ : state) benchmark::DoNotOptimize(perturb_palm(palm, field, RandomStream(7, 4)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PerturbPalmBatch)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_MeckeBattery(benchmark::State& state) {
  const GroupDomain real = GroupDomain::real_line();
  const Window window = Window::symmetric(real, 40);
  const SampleBatch palm = perturb_palm(
      sample_palm_batch(PalmSource::parse("lattice"), window, std::size_t(state.range(0)), RandomStream(7, 5)),
      IncrementSampler::parse("brownian:sigma=0.5"), RandomStream(7, 6));
  const auto functions = canonical_test_functions();
  for (auto _ : state) benchmark::DoNotOptimize(mecke_battery(palm, functions, 0.01));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MeckeBattery)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
