// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

namespace lidar_odom {

/// How the robust kernel scale is derived from sigma.
enum class KernelScaleMode {
    kSigmaOverThree,         // kappa = sigma / 3 (default)
    kSigmaOverThreeSquared,  // kappa = (sigma / 3)^2
};

/// Instant of the sweep that deskewed points, and therefore the estimated poses, refer to.
enum class DeskewReference {
    kSweepStart,  // s = 0: points are moved forward by their full stamp
    kMidSweep,    // s = dt / 2 (default): errors in the predicted velocity cancel to first order
};

/// Odometry parameters. Defaults are the fixed values used for every sensor; r_max, r_min
/// and dt describe the sensor and have to be set per dataset.
struct Config {
    double tau_0 = 2.0;         // initial correspondence threshold [m]
    double delta_min = 0.1;     // deviations at or below this are not used for sigma [m]
    std::size_t n_max = 20;     // points per map voxel
    double voxel_scale = 0.01;  // map voxel size as a fraction of r_max
    double alpha = 0.5;         // merge cloud voxel factor
    double beta = 1.5;          // registration cloud voxel factor
    double gamma = 1e-4;        // ICP convergence threshold on the correction norm
    double r_max = 100.0;       // [m]
    double r_min = 5.0;         // [m]
    double dt = 0.1;            // sweep duration [s]
    bool deskew_enabled = true;
    DeskewReference deskew_reference = DeskewReference::kMidSweep;
    KernelScaleMode kernel_scale_mode = KernelScaleMode::kSigmaOverThree;
    std::size_t max_iterations = 500;  // ICP safety valve

    double voxel_size() const { return voxel_scale * r_max; }
    double merge_voxel_size() const { return alpha * voxel_size(); }
    double registration_voxel_size() const { return beta * voxel_size(); }
    double deskew_reference_stamp() const {
        return deskew_reference == DeskewReference::kMidSweep ? 0.5 * dt : 0.0;
    }

    /// Throws std::invalid_argument naming the first violated bound.
    void validate() const;

    /// Sets one field from its textual form. Throws std::invalid_argument on unknown keys
    /// or unparsable values.
    void set(std::string_view key, std::string_view value);
};

/// Parses flat `key = value` text (one per line, '#' starts a comment) on top of `base`.
Config parse_config(std::string_view text, Config base = {});
Config load_config(const std::filesystem::path &path, Config base = {});

std::string to_string(KernelScaleMode mode);
std::string to_string(DeskewReference reference);

}  // namespace lidar_odom
