// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#include "lidar_odom/pipeline.hpp"

#include <chrono>
#include <ostream>

namespace lidar_odom {

namespace {

Config validated(const Config &config) {
    config.validate();
    return config;
}

}  // namespace

OdometryPipeline::OdometryPipeline(const Config &config)
    : config_(validated(config)),
      state_{{},
             VoxelMap(config.voxel_size(), config.r_max, config.n_max),
             DeviationModel(config),
             0} {}

Pose OdometryPipeline::process_frame(const Frame &frame) {
    const auto start = std::chrono::steady_clock::now();
    FrameStats stats;
    stats.index = state_.frame_index;
    stats.input_points = frame.points.size();

    const Pose previous = state_.history.empty() ? Pose::Identity() : state_.history.back();
    const Pose prediction = predict_relative(state_.history);

    PointCloud deskewed;
    if (config_.deskew_enabled) {
        deskewed = deskew(frame, velocities(prediction, config_.dt),
                          config_.deskew_reference_stamp());
    } else {
        deskewed.reserve(frame.points.size());
        for (const auto &p : frame.points) deskewed.push_back(p.position);
    }
    const PointCloud filtered = range_filter(deskewed, config_.r_min, config_.r_max);
    stats.filtered_points = filtered.size();

    stats.threshold = state_.threshold.threshold();
    stats.sigma = state_.threshold.sigma();
    stats.kernel_scale = state_.threshold.kernel_scale();

    Pose pose = previous;
    if (filtered.empty()) {
        stats.skipped = true;
        stats.converged = false;
    } else {
        const auto clouds = double_downsample(filtered, config_);
        stats.merge_points = clouds.merge.size();
        stats.registration_points = clouds.registration.size();

        const Pose initial = previous * prediction;
        const RegistrationOptions options{stats.threshold, stats.kernel_scale, config_.gamma,
                                          config_.max_iterations};
        const auto result = register_scan(clouds.registration, state_.map, initial, options);
        pose = result.delta_icp * initial;
        // Composing with T_{t-2}^-1 T_{t-1} amplifies rounding in the rotation block by
        // about 1 + sqrt(2) per frame; project back onto SO(3) before it feeds the next
        // prediction.
        pose.rotation = orthonormalize(pose.rotation);

        const Pose local = local_deviation(previous, prediction, result.delta_icp);
        const std::size_t before = state_.threshold.num_samples();
        stats.deviation = state_.threshold.update(local);
        stats.deviation_accepted = state_.threshold.num_samples() > before;

        state_.map.insert(transform_points(pose, clouds.merge));
        state_.map.remove_far(pose.translation);

        stats.iterations = result.iterations;
        stats.correspondences = result.final_correspondences;
        stats.converged = result.converged;
        stats.status = result.status;
    }

    state_.history.push_back(pose);
    ++state_.frame_index;
    stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    last_stats_ = stats;
    return pose;
}

SequenceError::SequenceError(std::size_t frame_index, const std::string &what, Trajectory partial)
    : std::runtime_error("frame " + std::to_string(frame_index) + ": " + what),
      frame_index_(frame_index),
      partial_(std::move(partial)) {}

Trajectory run_sequence(FrameSource &source, OdometryPipeline &pipeline,
                        const SequenceSinks &sinks) {
    const Config &config = pipeline.config();
    FrameAssembler assemble(config.dt, config.deskew_enabled);
    Trajectory trajectory;
    while (true) {
        const std::size_t index = pipeline.frame_index();
        try {
            auto scan = source.next();
            if (!scan) break;
            const Pose pose = pipeline.process_frame(assemble(scan->points, scan->stamps));
            trajectory.push_back(index, pose);
        } catch (const std::exception &e) {
            throw SequenceError(index, e.what(), trajectory);
        }
        if (sinks.on_pose) sinks.on_pose(index, trajectory.entries().back().pose);
        if (sinks.on_stats) sinks.on_stats(pipeline.last_stats());
    }
    return trajectory;
}

void write_threshold_csv(std::span<const FrameStats> stats, std::ostream &out) {
    out << "frame,deviation,sigma,tau\n";
    for (const auto &s : stats) {
        out << s.index << ',' << format_double(s.deviation) << ',' << format_double(s.sigma)
            << ',' << format_double(s.threshold) << '\n';
    }
}

}  // namespace lidar_odom
