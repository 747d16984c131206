// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "lidar_odom/geometry.hpp"
#include "lidar_odom/voxel_coord.hpp"

namespace lidar_odom {

struct Neighbor {
    Vector3d point;
    double distance;
};

/// Local map: a hash grid of voxels, each holding up to `max_points` points in their
/// original coordinates and in insertion order.
///
/// Const member functions may be called concurrently; mutations must not overlap reads.
class VoxelMap {
public:
    using Bucket = std::vector<Vector3d>;

    VoxelMap(double voxel_size, double max_range, std::size_t max_points);

    /// Appends each point to its voxel unless the voxel is already full.
    void insert(std::span<const Vector3d> points);

    /// Deletes every voxel whose first point lies farther than max_range from `origin`.
    void remove_far(const Vector3d &origin);

    /// Closest stored point within `max_dist` of `query`. Ties go to the voxel that comes
    /// first in lexicographic (di, dj, dk) offset order, then to the earlier-inserted point.
    std::optional<Neighbor> nearest_neighbor(const Vector3d &query, double max_dist) const;

    /// Reusable search context for many queries sharing one radius.
    class Search {
    public:
        std::optional<Neighbor> operator()(const Vector3d &query) const;

    private:
        friend class VoxelMap;
        struct Offset {
            int di, dj, dk;
            int rank;            // position in lexicographic order
            double lower_bound;  // minimum distance from any query in the center voxel
        };
        Search(const VoxelMap &map, double max_dist);
        std::optional<Neighbor> scan_offsets(const Vector3d &query) const;
        std::optional<Neighbor> scan_blocks(const Vector3d &query) const;

        const VoxelMap *map_;
        double max_dist_;
        int radius_;
        std::vector<Offset> offsets_;  // sorted by lower_bound, then rank; small radii only
    };

    /// Throws std::invalid_argument when max_dist <= 0.
    Search search(double max_dist) const { return Search(*this, max_dist); }

    std::size_t point_count() const { return num_points_; }
    std::size_t voxel_count() const { return voxels_.size(); }
    bool empty() const { return voxels_.empty(); }
    void clear();

    double voxel_size() const { return voxel_size_; }
    double max_range() const { return max_range_; }
    std::size_t max_points() const { return max_points_; }

    const Bucket *find(const VoxelCoord &coord) const;
    PointCloud points() const;

    template <typename Fn>
    void for_each_voxel(Fn &&fn) const {
        for (const auto &[coord, bucket] : voxels_) fn(coord, bucket);
    }

private:
    double voxel_size_;
    double max_range_;
    std::size_t max_points_;
    std::size_t num_points_ = 0;
    std::unordered_map<VoxelCoord, Bucket, VoxelCoordHash> voxels_;
    // Occupied voxels grouped into blocks of 8^3 voxels, so wide searches can skip
    // empty space.
    std::unordered_map<VoxelCoord, std::vector<VoxelCoord>, VoxelCoordHash> blocks_;
};

}  // namespace lidar_odom
