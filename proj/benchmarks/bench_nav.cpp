#include <benchmark/benchmark.h>

#include <hearth/nav.hpp>
#include <hearth/procgen.hpp>
#include <hearth/rng.hpp>

using namespace hearth;

static NavGrid random_grid(int side, std::uint64_t seed) {
  Rng rng(seed);
  NavGrid g;
  g.cell_size = 1.0;
  g.width = g.height = side;
  g.walkable.resize(static_cast<std::size_t>(side * side));
  for (auto& c : g.walkable) c = rng.chance(0.25) ? 0 : 1;
  g.walkable.front() = g.walkable.back() = 1;
  return g;
}

static void BM_FindPathRandomGrid(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const NavGrid g = random_grid(side, 3);
  const Vec3 a = g.center(0), b = g.center(side * side - 1);
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(find_path(g, a, b));
    } catch (const NoPath&) {
    }
  }
}
BENCHMARK(BM_FindPathRandomGrid)->Arg(32)->Arg(64)->Arg(128);

static void BM_BuildNavGrid(benchmark::State& state) {
  ProcGenConfig c;
  c.room_count = static_cast<int>(state.range(0));
  const SceneSpec s = generate_house(11, c);
  const auto& cat = *AssetCatalog::builtin();
  for (auto _ : state) benchmark::DoNotOptimize(build_nav_grid(s, cat));
}
BENCHMARK(BM_BuildNavGrid)->DenseRange(1, 4);
BENCHMARK_MAIN();
