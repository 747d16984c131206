// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#pragma once

#include <span>
#include <vector>

#include "lidar_odom/geometry.hpp"

namespace lidar_odom {

/// Translational (m/s) and angular (axis-angle rad/s) velocity of the sensor.
struct VelocityEstimate {
    Vector3d linear = Vector3d::Zero();
    AxisAngle angular = AxisAngle::Zero();
};

/// Global poses of all processed frames, oldest first.
using PoseHistory = std::vector<Pose>;

/// Constant-velocity prediction: the increment between the last two poses, expressed in
/// the frame of the older one. Identity until two poses exist.
Pose predict_relative(std::span<const Pose> history);

/// Velocities implied by a relative motion `pred` over `dt` seconds.
/// Throws std::invalid_argument when dt <= 0.
VelocityEstimate velocities(const Pose &pred, double dt);

}  // namespace lidar_odom
