#include <benchmark/benchmark.h>

#include <hearth/procgen.hpp>
#include <hearth/render.hpp>
#include <hearth/sim.hpp>

using namespace hearth;

static EnvState house_env() { return reset(generate_house(5, ProcGenConfig{}), AssetCatalog::builtin()); }

static void BM_RenderEgocentric(benchmark::State& state) {
  const EnvState env = house_env();
  CameraConfig cam;
  cam.width = cam.height = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(render_egocentric(env, cam));
  state.SetItemsProcessed(state.iterations() * cam.width * cam.height);
}
BENCHMARK(BM_RenderEgocentric)->Arg(128)->Arg(256)->Arg(512);

static void BM_EncodePng(benchmark::State& state) {
  const Frame f = render_egocentric(house_env());
  for (auto _ : state) benchmark::DoNotOptimize(encode_png(f));
}
BENCHMARK(BM_EncodePng);
