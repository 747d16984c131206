// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#include <benchmark/benchmark.h>

#include "lidar_odom/pipeline.hpp"
#include "support/synthetic.hpp"

namespace {

using namespace lidar_odom;

const testing::SyntheticWorld &world() {
    static const testing::SyntheticWorld w(7);
    return w;
}

PointCloud scan(std::size_t count) {
    testing::Rng rng(1);
    return range_filter(world().sample(count, rng), 5.0, 100.0);
}

void BM_VoxelDownsample(benchmark::State &state) {
    const PointCloud points = scan(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(voxel_downsample(points, 0.5));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(points.size()));
}
BENCHMARK(BM_VoxelDownsample)->Arg(10000)->Arg(100000);

void BM_NearestNeighbor(benchmark::State &state) {
    VoxelMap map(1.0, 100.0, 20);
    map.insert(scan(100000));
    testing::Rng rng(2);
    const PointCloud queries = world().sample(1000, rng);
    const auto search = map.search(2.0);
    for (auto _ : state) {
        for (const auto &q : queries) benchmark::DoNotOptimize(search(q));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(queries.size()));
}
BENCHMARK(BM_NearestNeighbor);

void BM_RegisterScan(benchmark::State &state) {
    const PointCloud points = scan(100000);
    VoxelMap map(1.0, 100.0, 20);
    map.insert(voxel_downsample(points, 0.5));
    const PointCloud source = voxel_downsample(points, 1.5);
    Pose initial;
    initial.translation = {0.3, -0.2, 0.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(register_scan(source, map, initial, RegistrationOptions{}));
    }
}
BENCHMARK(BM_RegisterScan)->Unit(benchmark::kMillisecond);

void BM_ProcessFrame(benchmark::State &state) {
    std::vector<Pose> increments(20, testing::planar_increment(10.0, 0.1, 0.1));
    const auto poses = testing::integrate(increments);
    const testing::SyntheticWorld route_world(7, 80.0, poses);
    testing::SpinningLidar lidar;
    lidar.columns = 1800;  // ~110k shots per sweep
    lidar.max_range = 100.0;
    const auto frames = testing::simulate_sequence(route_world, poses, 0.1, 3, lidar);
    for (auto _ : state) {
        state.PauseTiming();
        OdometryPipeline pipeline(Config{});
        state.ResumeTiming();
        for (const auto &f : frames) pipeline.process_frame(f.frame);
    }
    state.counters["frame_rate"] = benchmark::Counter(
        static_cast<double>(frames.size()), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_ProcessFrame)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
