// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <vector>

#include "lidar_odom/config.hpp"
#include "lidar_odom/geometry.hpp"

namespace lidar_odom {

/// Upper bound on how far a point within `max_range` moves under `delta`:
/// 2 r_max sin(theta / 2) + ||t||.
double deviation(const Pose &delta, double max_range);

/// Deviation of the ICP result from the prediction, expressed in the predicted frame:
/// (prev * pred)^-1 * delta_icp * (prev * pred).
Pose local_deviation(const Pose &previous, const Pose &prediction, const Pose &delta_icp);

/// Running statistics of prediction deviations, giving the correspondence threshold
/// tau = 3 sigma and the robust kernel scale.
class DeviationModel {
public:
    DeviationModel(double initial_threshold, double min_deviation, double max_range,
                   KernelScaleMode mode = KernelScaleMode::kSigmaOverThree);
    explicit DeviationModel(const Config &config)
        : DeviationModel(config.tau_0, config.delta_min, config.r_max, config.kernel_scale_mode) {}

    /// Accumulates deviation(delta) if it exceeds the minimum deviation. Returns the
    /// deviation that was evaluated.
    double update(const Pose &delta);

    double sigma() const;
    double threshold() const;
    double kernel_scale() const;

    double sum_sq() const { return sum_sq_; }
    std::size_t num_samples() const { return num_; }
    double initial_threshold() const { return tau_0_; }
    double min_deviation() const { return delta_min_; }
    double max_range() const { return max_range_; }

    /// Keeps every accepted deviation so the running sums can be cross-checked.
    void keep_sample_log(bool keep) { keep_log_ = keep; }
    const std::vector<double> &sample_log() const { return log_; }

private:
    double sum_sq_ = 0.0;
    std::size_t num_ = 0;
    double tau_0_;
    double delta_min_;
    double max_range_;
    KernelScaleMode mode_;
    bool keep_log_ = false;
    std::vector<double> log_;
};

}  // namespace lidar_odom
