// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lidar_odom/config.hpp"
#include "lidar_odom/geometry.hpp"
#include "lidar_odom/motion_model.hpp"

namespace lidar_odom {

/// A measured point and its acquisition time relative to the first point of the sweep.
struct TimedPoint {
    Vector3d position = Vector3d::Zero();
    double stamp = 0.0;  // seconds, in [0, dt]
};

/// One sweep of the sensor.
struct Frame {
    std::vector<TimedPoint> points;
    double dt = 0.1;
};

/// Motion-compensates a sweep into the sensor frame at stamp `reference` (default: the first
/// measurement): p* = Exp(s w) p + s v with s = stamp - reference. Output order matches
/// input order.
PointCloud deskew(const Frame &frame, const VelocityEstimate &velocity, double reference = 0.0);

/// Keeps the first point (in input order) falling into each voxel of side `voxel_size`.
/// Retained points are copied verbatim and keep their relative order.
/// Throws std::invalid_argument when voxel_size <= 0.
PointCloud voxel_downsample(std::span<const Vector3d> points, double voxel_size);

struct DownsampledClouds {
    PointCloud merge;         // alpha * v, used to update the map
    PointCloud registration;  // beta * v applied to `merge`, used for ICP
};

DownsampledClouds double_downsample(std::span<const Vector3d> deskewed, const Config &config);

/// Keeps points with r_min <= ||p|| <= r_max. Throws std::invalid_argument unless
/// 0 <= r_min < r_max.
PointCloud range_filter(std::span<const Vector3d> points, double r_min, double r_max);

/// Linearly rescales stamps so that min -> 0 and max -> dt. A constant sequence maps to 0.
std::vector<double> normalize_stamps(std::span<const double> stamps, double dt);

/// Builds frames from raw points and optional per-point stamps.
///
/// Stamps that are present are normalized to [0, dt]. Without stamps, and when synthesis is
/// enabled, each point is stamped by its azimuth as a fraction of one revolution starting at
/// the first point. The spin direction is detected from the first frame that needs it and
/// reused afterwards. With synthesis disabled stamp-less points get s = 0.
class FrameAssembler {
public:
    FrameAssembler(double dt, bool synthesize_stamps)
        : dt_(dt), synthesize_stamps_(synthesize_stamps) {}

    Frame operator()(const PointCloud &points, std::span<const double> stamps);

    /// +1 counter-clockwise, -1 clockwise; empty until detected.
    std::optional<int> spin_direction() const { return spin_direction_; }

private:
    std::vector<double> azimuth_stamps(const PointCloud &points);

    double dt_;
    bool synthesize_stamps_;
    std::optional<int> spin_direction_;
};

}  // namespace lidar_odom
