// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#include "lidar_odom/motion_model.hpp"

#include <stdexcept>

namespace lidar_odom {

Pose predict_relative(std::span<const Pose> history) {
    if (history.size() < 2) return Pose::Identity();
    const Pose &older = history[history.size() - 2];
    const Pose &last = history.back();
    Pose pred;
    pred.rotation = older.rotation.transpose() * last.rotation;
    pred.translation = older.rotation.transpose() * (last.translation - older.translation);
    return pred;
}

VelocityEstimate velocities(const Pose &pred, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("velocities: dt must be positive");
    return {pred.translation / dt, log_so3(pred.rotation) / dt};
}

}  // namespace lidar_odom
