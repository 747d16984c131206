// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>

#include "lidar_odom/geometry.hpp"

namespace lidar_odom {

/// Integer cell index, floor(p / voxel_size) per axis.
struct VoxelCoord {
    std::int64_t i = 0;
    std::int64_t j = 0;
    std::int64_t k = 0;

    friend auto operator<=>(const VoxelCoord &, const VoxelCoord &) = default;
};

inline VoxelCoord voxel_of(const Vector3d &p, double voxel_size) {
    return {static_cast<std::int64_t>(std::floor(p.x() / voxel_size)),
            static_cast<std::int64_t>(std::floor(p.y() / voxel_size)),
            static_cast<std::int64_t>(std::floor(p.z() / voxel_size))};
}

struct VoxelCoordHash {
    std::size_t operator()(const VoxelCoord &v) const noexcept {
        // Teschner et al. spatial hash primes, widened to 64 bit
        const auto h = static_cast<std::uint64_t>(v.i) * 73856093ULL ^
                       static_cast<std::uint64_t>(v.j) * 19349669ULL ^
                       static_cast<std::uint64_t>(v.k) * 83492791ULL;
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

}  // namespace lidar_odom
