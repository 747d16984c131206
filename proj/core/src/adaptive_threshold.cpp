// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#include "lidar_odom/adaptive_threshold.hpp"

#include <cmath>
#include <stdexcept>

namespace lidar_odom {

double deviation(const Pose &delta, double max_range) {
    const double theta = rotation_angle(delta.rotation);
    return 2.0 * max_range * std::sin(0.5 * theta) + delta.translation.norm();
}

Pose local_deviation(const Pose &previous, const Pose &prediction, const Pose &delta_icp) {
    const Pose initial = previous * prediction;
    return initial.inverse() * delta_icp * initial;
}

DeviationModel::DeviationModel(double initial_threshold, double min_deviation,
                               double max_range, KernelScaleMode mode)
    : tau_0_(initial_threshold), delta_min_(min_deviation), max_range_(max_range), mode_(mode) {
    if (!(initial_threshold > 0.0)) {
        throw std::invalid_argument("DeviationModel: initial threshold must be > 0");
    }
    if (!(min_deviation >= 0.0)) {
        throw std::invalid_argument("DeviationModel: minimum deviation must be >= 0");
    }
}

double DeviationModel::update(const Pose &delta) {
    const double d = deviation(delta, max_range_);
    if (d > delta_min_) {
        sum_sq_ += d * d;
        ++num_;
        if (keep_log_) log_.push_back(d);
    }
    return d;
}

double DeviationModel::sigma() const {
    if (num_ == 0) return tau_0_ / 3.0;
    return std::sqrt(sum_sq_ / static_cast<double>(num_));
}

double DeviationModel::threshold() const {
    if (num_ == 0) return tau_0_;
    return 3.0 * sigma();
}

double DeviationModel::kernel_scale() const {
    const double scale = sigma() / 3.0;
    return mode_ == KernelScaleMode::kSigmaOverThree ? scale : scale * scale;
}

}  // namespace lidar_odom
