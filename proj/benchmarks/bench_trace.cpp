// SPDX-License-Identifier: Apache-2.0
#include <random>

#include <benchmark/benchmark.h>

#include "uavprop/orchestrator.hpp"
#include "uavprop/raytracer.hpp"
#include "uavprop/scene.hpp"

namespace {

using namespace uavprop;

const SceneIndex& city()
{
    static const SceneIndex index{parse_scene(generate_scenario(ScenarioParams{}).scene)};
    return index;
}

constexpr Vec3 kTx{40.0, 11.5, 5.0};
constexpr Vec3 kRx{-20.0, 2.0, 100.0};

void BM_BvhIntersect(benchmark::State& state)
{
    const auto& index = city();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec3> dirs(1024);
    for (auto& d : dirs) {
        d = normalized(Vec3{u(rng), u(rng), u(rng) - 0.3});
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(index.bvh().intersect(kTx, dirs[i++ & 1023u], 1e9));
    }
}
BENCHMARK(BM_BvhIntersect);

void BM_LaunchDirections(benchmark::State& state)
{
    for (auto _ : state) {
        benchmark::DoNotOptimize(launch_directions(1.0));
    }
}
BENCHMARK(BM_LaunchDirections)->Unit(benchmark::kMillisecond);

void BM_TraceSpecular(benchmark::State& state)
{
    const auto& index = city();
    TraceConfig cfg;
    cfg.max_reflections = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(trace_specular(index, kTx, kRx, cfg));
    }
}
BENCHMARK(BM_TraceSpecular)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_TraceDiffuse(benchmark::State& state)
{
    const auto& index = city();
    TraceConfig cfg;
    TraceOptions opts;
    opts.diffuse_limit = 25;
    for (auto _ : state) {
        benchmark::DoNotOptimize(trace_diffuse(index, kTx, kRx, cfg, opts));
    }
}
BENCHMARK(BM_TraceDiffuse)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
