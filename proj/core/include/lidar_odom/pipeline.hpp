// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>

#include "lidar_odom/adaptive_threshold.hpp"
#include "lidar_odom/config.hpp"
#include "lidar_odom/geometry.hpp"
#include "lidar_odom/io.hpp"
#include "lidar_odom/motion_model.hpp"
#include "lidar_odom/preprocess.hpp"
#include "lidar_odom/registration.hpp"
#include "lidar_odom/voxel_map.hpp"

namespace lidar_odom {

/// Diagnostics of one processed frame.
struct FrameStats {
    std::size_t index = 0;
    std::size_t input_points = 0;
    std::size_t filtered_points = 0;
    std::size_t merge_points = 0;
    std::size_t registration_points = 0;
    double threshold = 0.0;     // tau used for this frame
    double sigma = 0.0;         // tau / 3
    double kernel_scale = 0.0;  // kappa used for this frame
    double deviation = 0.0;     // delta of this frame's local deviation
    bool deviation_accepted = false;
    std::size_t iterations = 0;
    std::size_t correspondences = 0;
    bool converged = false;
    RegistrationStatus status = RegistrationStatus::kConverged;
    bool skipped = false;  // no points survived filtering
    double seconds = 0.0;
};

struct OdometryState {
    PoseHistory history;
    VoxelMap map;
    DeviationModel threshold;
    std::size_t frame_index = 0;
};

/// Frame-to-map odometry: predict, deskew, downsample, register, update.
/// Not thread-safe; one frame at a time.
class OdometryPipeline {
public:
    /// Throws std::invalid_argument if the config is invalid.
    explicit OdometryPipeline(const Config &config);

    /// Processes the next sweep and returns its global pose: the sensor frame at the deskew
    /// reference instant (mid-sweep by default; sweep start when deskewing is off).
    Pose process_frame(const Frame &frame);

    const Config &config() const { return config_; }
    const OdometryState &state() const { return state_; }
    const PoseHistory &poses() const { return state_.history; }
    const VoxelMap &map() const { return state_.map; }
    const DeviationModel &threshold_model() const { return state_.threshold; }
    DeviationModel &threshold_model() { return state_.threshold; }
    std::size_t frame_index() const { return state_.frame_index; }
    const FrameStats &last_stats() const { return last_stats_; }

private:
    Config config_;
    OdometryState state_;
    FrameStats last_stats_;
};

struct SequenceSinks {
    std::function<void(std::size_t, const Pose &)> on_pose;
    std::function<void(const FrameStats &)> on_stats;
};

/// A failure while reading or processing a frame. Carries the trajectory up to the failure.
class SequenceError : public std::runtime_error {
public:
    SequenceError(std::size_t frame_index, const std::string &what, Trajectory partial);
    std::size_t frame_index() const { return frame_index_; }
    const Trajectory &partial() const { return partial_; }

private:
    std::size_t frame_index_;
    Trajectory partial_;
};

/// Streams every scan of `source` through `pipeline`.
Trajectory run_sequence(FrameSource &source, OdometryPipeline &pipeline,
                        const SequenceSinks &sinks = {});

/// frame,deviation,sigma,tau
void write_threshold_csv(std::span<const FrameStats> stats, std::ostream &out);

}  // namespace lidar_odom
