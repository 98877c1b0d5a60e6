// Parallel kernels against their serial references.

#include <numbers>

#include <benchmark/benchmark.h>

#include "hyperspace/batch.hpp"
#include "hyperspace/render.hpp"

using namespace hyperspace;

namespace {

Scene benchScene(Space space, int depth) {
    Scene scene;
    scene.space = space;
    scene.tilingDepth = depth;
    scene.props = {{-1, MeshKind::CubeFrame, {220, 220, 220}}, {-1, MeshKind::FloorTile, {90, 140, 200}}};
    buildTiling(scene);
    return scene;
}

void BM_RenderParallel(benchmark::State& state) {
    const Scene scene = benchScene(Space::H3, static_cast<int>(state.range(0)));
    const CameraFrame cam = CameraFrame::placed(Space::H3, {0.1, 0.0, 0.2}, 0.3, -0.2);
    for (auto _ : state) benchmark::DoNotOptimize(renderFrame(scene, cam, 1.2, 640, 480));
}

void BM_RenderSerial(benchmark::State& state) {
    const Scene scene = benchScene(Space::H3, static_cast<int>(state.range(0)));
    const CameraFrame cam = CameraFrame::placed(Space::H3, {0.1, 0.0, 0.2}, 0.3, -0.2);
    for (auto _ : state) benchmark::DoNotOptimize(renderFrameSerial(scene, cam, 1.2, 640, 480));
}

void BM_GaussBonnetParallel(benchmark::State& state) {
    const auto tris = randomH2Triangles(static_cast<std::size_t>(state.range(0)), 7);
    for (auto _ : state) benchmark::DoNotOptimize(triangleHolonomies(tris));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GaussBonnetSerial(benchmark::State& state) {
    const auto tris = randomH2Triangles(static_cast<std::size_t>(state.range(0)), 7);
    for (auto _ : state) benchmark::DoNotOptimize(triangleHolonomiesSerial(tris));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_RenderParallel)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RenderSerial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaussBonnetParallel)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaussBonnetSerial)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
