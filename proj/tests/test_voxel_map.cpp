// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <tbb/parallel_for.h>

#include <cmath>

#include "lidar_odom/voxel_map.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace lidar_odom {
namespace {

using testing::Rng;

TEST(VoxelMap, EmptyMap) {
    const VoxelMap map(1.0, 100.0, 20);
    EXPECT_EQ(map.point_count(), 0u);
    EXPECT_EQ(map.voxel_count(), 0u);
    EXPECT_FALSE(map.nearest_neighbor({0, 0, 0}, 2.0));
}

TEST(VoxelMap, SinglePoint) {
    VoxelMap map(1.0, 100.0, 20);
    const PointCloud one{{0.5, 0, 0}};
    map.insert(one);
    EXPECT_EQ(map.point_count(), 1u);
    EXPECT_EQ(map.voxel_count(), 1u);
    const auto nn = map.nearest_neighbor({0, 0, 0}, 2.0);
    ASSERT_TRUE(nn);
    EXPECT_EQ(nn->point, Vector3d(0.5, 0, 0));
    EXPECT_DOUBLE_EQ(nn->distance, 0.5);
    EXPECT_FALSE(map.nearest_neighbor({0, 0, 0}, 0.4));
}

TEST(VoxelMap, CapacityKeepsFirstPoints) {
    VoxelMap map(1.0, 100.0, 20);
    PointCloud cloud;
    for (int i = 0; i < 25; ++i) cloud.emplace_back(0.01 * i, 0.5, 0.5);
    map.insert(cloud);
    ASSERT_EQ(map.voxel_count(), 1u);
    const auto *bucket = map.find({0, 0, 0});
    ASSERT_NE(bucket, nullptr);
    EXPECT_EQ(*bucket, PointCloud(cloud.begin(), cloud.begin() + 20));
}

TEST(VoxelMap, DistinctVoxelCounts) {
    VoxelMap map(1.0, 100.0, 20);
    const PointCloud cloud{{0.5, 0.5, 0.5}, {1.5, 0.5, 0.5}, {-0.5, 0.5, 0.5}};
    map.insert(cloud);
    EXPECT_EQ(map.point_count(), 3u);
    EXPECT_EQ(map.voxel_count(), 3u);
}

TEST(VoxelMap, RemoveFar) {
    VoxelMap map(1.0, 10.0, 20);
    const PointCloud near{{1, 1, 1}, {5, 0, 0}};
    map.insert(near);
    map.remove_far(Vector3d::Zero());
    EXPECT_EQ(map.voxel_count(), 2u);
    const PointCloud far{{20.5, 0, 0}};
    map.insert(far);
    map.remove_far(Vector3d::Zero());
    EXPECT_EQ(map.voxel_count(), 2u);
    EXPECT_EQ(map.point_count(), 2u);
}

TEST(VoxelMap, RemoveFarTestsFirstPointOnly) {
    VoxelMap map(10.0, 10.0, 20);
    // Same voxel: first point at 9 m, second at ~11 m.
    const PointCloud cloud{{9, 0, 0}, {9.9, 4.5, 0}};
    map.insert(cloud);
    map.remove_far(Vector3d::Zero());
    EXPECT_EQ(map.point_count(), 2u);
}

TEST(VoxelMap, RejectsBadParameters) {
    EXPECT_THROW(VoxelMap(0.0, 1.0, 1), std::invalid_argument);
    EXPECT_THROW(VoxelMap(1.0, 0.0, 1), std::invalid_argument);
    EXPECT_THROW(VoxelMap(1.0, 1.0, 0), std::invalid_argument);
    const VoxelMap map(1.0, 1.0, 1);
    EXPECT_THROW(map.nearest_neighbor({0, 0, 0}, 0.0), std::invalid_argument);
}

TEST(VoxelMap, SearchRadiusCoversThresholdLargerThanVoxel) {
    // tau = 2 m with v = 0.5 m: the neighbor is four voxels away.
    VoxelMap map(0.5, 100.0, 20);
    const PointCloud cloud{{1.9, 0.1, 0.1}};
    map.insert(cloud);
    const auto nn = map.nearest_neighbor({0.05, 0.1, 0.1}, 2.0);
    ASSERT_TRUE(nn);
    EXPECT_NEAR(nn->distance, 1.85, 1e-12);
}

TEST(VoxelMap, TiesGoToLexicographicallyFirstVoxel) {
    VoxelMap map(1.0, 100.0, 20);
    // Both at distance 0.5 from the query (1, 0.5, 0.5): one in voxel (1,0,0), one in (0,0,0).
    const PointCloud cloud{{1.5, 0.5, 0.5}, {0.5, 0.5, 0.5}};
    map.insert(cloud);
    const auto nn = map.nearest_neighbor({1.0, 0.5, 0.5}, 1.0);
    ASSERT_TRUE(nn);
    EXPECT_EQ(nn->point, Vector3d(0.5, 0.5, 0.5));
}

TEST(VoxelMap, StoresOriginalCoordinates) {
    Rng rng(1);
    std::uniform_real_distribution<double> c(-30, 30);
    PointCloud cloud(2000);
    for (auto &p : cloud) p = {c(rng), c(rng), c(rng)};
    VoxelMap map(1.0, 100.0, 20);
    map.insert(cloud);
    map.for_each_voxel([&](const VoxelCoord &coord, const VoxelMap::Bucket &bucket) {
        EXPECT_GE(bucket.size(), 1u);
        EXPECT_LE(bucket.size(), 20u);
        for (const auto &p : bucket) {
            EXPECT_EQ(voxel_of(p, 1.0), coord);
            EXPECT_NE(std::find(cloud.begin(), cloud.end(), p), cloud.end());
        }
    });
}

TEST(VoxelMap, MatchesListOracleOnRandomWorkloads) {
    Rng rng(2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int workload = 0; workload < 20; ++workload) {
        const double v = 0.2 + 1.8 * unit(rng);
        const double range = 15.0 + 20.0 * unit(rng);
        const std::size_t cap = 1 + static_cast<std::size_t>(unit(rng) * 8);
        VoxelMap map(v, range, cap);
        testing::ListMap oracle(v, range, cap);
        std::uniform_real_distribution<double> c(-25, 25);
        for (int batch = 0; batch < 4; ++batch) {
            PointCloud cloud(500);
            for (auto &p : cloud) p = {c(rng), c(rng), c(rng)};
            map.insert(cloud);
            oracle.insert(cloud);
            const Vector3d origin(c(rng), c(rng), c(rng));
            map.remove_far(origin);
            oracle.remove_far(origin);
            ASSERT_EQ(map.voxel_count(), oracle.voxel_count());
            ASSERT_EQ(map.point_count(), oracle.point_count());
        }
        for (const auto &[cell, points] : oracle.buckets()) {
            const auto *bucket = map.find({cell[0], cell[1], cell[2]});
            ASSERT_NE(bucket, nullptr);
            EXPECT_EQ(*bucket, points);
        }
        const double max_dist = 0.3 + 2.5 * unit(rng);
        for (int q = 0; q < 300; ++q) {
            const Vector3d query(c(rng), c(rng), c(rng));
            const auto got = map.nearest_neighbor(query, max_dist);
            const auto want = oracle.nearest(query, max_dist);
            ASSERT_EQ(got.has_value(), want.has_value());
            if (got) {
                EXPECT_EQ(got->point, want->first);
                EXPECT_EQ(got->distance, want->second);
            }
        }
    }
}

TEST(VoxelMap, WideSearchMatchesOracleIncludingTies) {
    // Lattice coordinates are exact in binary, so many candidates tie on distance; radii
    // from 1 to 12 voxels cover both the offset scan and the block scan.
    Rng rng(12);
    std::uniform_int_distribution<int> cell(-40, 40);
    const double v = 0.5;
    for (const double max_dist : {0.5, 1.0, 1.25, 2.0, 3.75, 6.0}) {
        VoxelMap map(v, 100.0, 3);
        testing::ListMap oracle(v, 100.0, 3);
        PointCloud cloud(3000);
        for (auto &p : cloud) p = 0.25 * Vector3d(cell(rng), cell(rng), cell(rng));
        map.insert(cloud);
        oracle.insert(cloud);
        const Vector3d origin(2.0, -1.0, 0.5);
        map.remove_far(origin);
        oracle.remove_far(origin);
        const auto search = map.search(max_dist);
        for (int q = 0; q < 2000; ++q) {
            const Vector3d query = 0.25 * Vector3d(cell(rng), cell(rng), cell(rng));
            const auto got = search(query);
            const auto want = oracle.nearest(query, max_dist);
            ASSERT_EQ(got.has_value(), want.has_value()) << max_dist;
            if (got) {
                ASSERT_EQ(got->point, want->first) << max_dist;
                ASSERT_EQ(got->distance, want->second);
            }
        }
    }
}

TEST(VoxelMap, WideSearchOnRandomWorkloads) {
    Rng rng(13);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> c(-25, 25);
    for (int workload = 0; workload < 10; ++workload) {
        const double v = 0.2 + 0.8 * unit(rng);
        VoxelMap map(v, 30.0, 4);
        testing::ListMap oracle(v, 30.0, 4);
        for (int batch = 0; batch < 3; ++batch) {
            PointCloud cloud(1500);
            for (auto &p : cloud) p = {c(rng), c(rng), c(rng)};
            map.insert(cloud);
            oracle.insert(cloud);
            const Vector3d origin(c(rng), c(rng), c(rng));
            map.remove_far(origin);
            oracle.remove_far(origin);
        }
        const double max_dist = v * (3.0 + 10.0 * unit(rng));
        for (int q = 0; q < 300; ++q) {
            const Vector3d query(c(rng), c(rng), c(rng));
            const auto got = map.nearest_neighbor(query, max_dist);
            const auto want = oracle.nearest(query, max_dist);
            ASSERT_EQ(got.has_value(), want.has_value());
            if (got) {
                EXPECT_EQ(got->point, want->first);
            }
        }
    }
}

TEST(VoxelMap, BoundedAfterRemoveFar) {
    Rng rng(3);
    std::uniform_real_distribution<double> c(-200, 200);
    const double v = 2.0, range = 20.0;
    VoxelMap map(v, range, 5);
    PointCloud cloud(20000);
    for (auto &p : cloud) p = {c(rng), c(rng), c(rng)};
    map.insert(cloud);
    map.remove_far(Vector3d::Zero());
    const double side = 2 * std::ceil(range / v) + 1;
    EXPECT_LE(static_cast<double>(map.voxel_count()), side * side * side);
    map.for_each_voxel([&](const VoxelCoord &, const VoxelMap::Bucket &bucket) {
        EXPECT_LE(bucket.front().norm(), range);
    });
}

TEST(VoxelMap, ConcurrentQueriesMatchSequential) {
    Rng rng(4);
    std::uniform_real_distribution<double> c(-20, 20);
    VoxelMap map(0.5, 100.0, 20);
    PointCloud cloud(20000);
    for (auto &p : cloud) p = {c(rng), c(rng), c(rng)};
    map.insert(cloud);
    PointCloud queries(5000);
    for (auto &p : queries) p = {c(rng), c(rng), c(rng)};
    std::vector<std::optional<Neighbor>> parallel(queries.size());
    const auto search = map.search(1.0);
    tbb::parallel_for(std::size_t{0}, queries.size(),
                      [&](std::size_t i) { parallel[i] = search(queries[i]); });
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const auto seq = map.nearest_neighbor(queries[i], 1.0);
        ASSERT_EQ(seq.has_value(), parallel[i].has_value());
        if (seq) {
            EXPECT_EQ(seq->point, parallel[i]->point);
        }
    }
}

}  // namespace
}  // namespace lidar_odom
