// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "lidar_odom/geometry.hpp"

namespace lidar_odom {

inline constexpr double kSegmentLengths[] = {100, 200, 300, 400, 500, 600, 700, 800};

struct LengthError {
    double length = 0.0;
    std::size_t segments = 0;
    double translational_percent = 0.0;
    double rotational_deg_per_m = 0.0;
};

struct RelativeErrorReport {
    double avg_translational_percent = 0.0;
    double avg_rotational_deg_per_m = 0.0;
    std::size_t segments = 0;
    std::vector<LengthError> per_length;
    /// True when the ground truth is too short for any segment.
    bool no_segments() const { return segments == 0; }
};

/// KITTI odometry drift: every frame starts one segment per length; a segment ends at the
/// first frame whose ground-truth path distance reaches the start distance plus the length.
/// Translational error is reported in percent of the length, rotational in deg/m.
/// Throws std::invalid_argument when the trajectories differ in length.
RelativeErrorReport relative_errors(std::span<const Pose> estimate,
                                    std::span<const Pose> ground_truth,
                                    std::span<const double> lengths = kSegmentLengths);

struct AteReport {
    double translation = 0.0;  // RMS position residual [m]
    double rotation = 0.0;     // RMS geodesic angle residual [rad]
    Pose alignment;            // applied to the estimate
};

class InsufficientDataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Absolute trajectory error after the rigid (no scale) alignment of estimated to
/// ground-truth positions that minimizes the RMS position error.
/// Throws InsufficientDataError with fewer than three poses.
AteReport ate(std::span<const Pose> estimate, std::span<const Pose> ground_truth);

/// Least-squares rigid transform taking `from` onto `to`.
Pose align_rigid(std::span<const Vector3d> from, std::span<const Vector3d> to);

void print_report(const RelativeErrorReport &relative, const AteReport &absolute,
                  std::ostream &out);
void write_report_csv(const RelativeErrorReport &relative, const AteReport &absolute,
                      std::ostream &out);

}  // namespace lidar_odom
