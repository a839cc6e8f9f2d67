#include <benchmark/benchmark.h>

#include <hearth/procgen.hpp>
#include <hearth/trajgen.hpp>

using namespace hearth;

static void BM_GenerateHouse(benchmark::State& state) {
  ProcGenConfig c;
  c.room_count = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_house(seed++, c));
}
BENCHMARK(BM_GenerateHouse)->DenseRange(1, 4);

static void BM_GenerateEpisode(benchmark::State& state) {
  std::uint64_t seed = 0;
  const auto tmpl = static_cast<TaskTemplate>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_episode(seed++, tmpl));
}
BENCHMARK(BM_GenerateEpisode)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);
