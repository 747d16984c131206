// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#include "lidar_odom/eval.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

namespace lidar_odom {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

void require_same_length(std::size_t a, std::size_t b) {
    if (a != b) {
        throw std::invalid_argument("trajectory lengths differ: estimate has " +
                                    std::to_string(a) + " poses, ground truth has " +
                                    std::to_string(b) + " poses");
    }
}

}  // namespace

RelativeErrorReport relative_errors(std::span<const Pose> estimate,
                                    std::span<const Pose> ground_truth,
                                    std::span<const double> lengths) {
    require_same_length(estimate.size(), ground_truth.size());
    const std::size_t n = ground_truth.size();

    std::vector<double> distance(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        distance[i] = distance[i - 1] +
                      (ground_truth[i].translation - ground_truth[i - 1].translation).norm();
    }

    RelativeErrorReport report;
    report.per_length.reserve(lengths.size());
    double sum_t = 0.0;
    double sum_r = 0.0;
    for (const double length : lengths) {
        LengthError bucket;
        bucket.length = length;
        double bucket_t = 0.0;
        double bucket_r = 0.0;
        for (std::size_t first = 0; first < n; ++first) {
            const auto it =
                std::lower_bound(distance.begin() + first, distance.end(), distance[first] + length);
            if (it == distance.end()) break;
            const auto last = static_cast<std::size_t>(it - distance.begin());

            const Pose delta_gt = ground_truth[first].inverse() * ground_truth[last];
            const Pose delta_est = estimate[first].inverse() * estimate[last];
            const Pose error = delta_est.inverse() * delta_gt;
            bucket_t += error.translation.norm() / length;
            bucket_r += rotation_angle(error.rotation) / length;
            ++bucket.segments;
        }
        if (bucket.segments > 0) {
            const double count = static_cast<double>(bucket.segments);
            bucket.translational_percent = 100.0 * bucket_t / count;
            bucket.rotational_deg_per_m = kRadToDeg * bucket_r / count;
        }
        sum_t += bucket_t;
        sum_r += bucket_r;
        report.segments += bucket.segments;
        report.per_length.push_back(bucket);
    }
    if (report.segments > 0) {
        const double count = static_cast<double>(report.segments);
        report.avg_translational_percent = 100.0 * sum_t / count;
        report.avg_rotational_deg_per_m = kRadToDeg * sum_r / count;
    }
    return report;
}

Pose align_rigid(std::span<const Vector3d> from, std::span<const Vector3d> to) {
    require_same_length(from.size(), to.size());
    Eigen::Matrix3Xd src(3, static_cast<Eigen::Index>(from.size()));
    Eigen::Matrix3Xd dst(3, static_cast<Eigen::Index>(to.size()));
    for (std::size_t i = 0; i < from.size(); ++i) {
        src.col(static_cast<Eigen::Index>(i)) = from[i];
        dst.col(static_cast<Eigen::Index>(i)) = to[i];
    }
    return Pose::FromMatrix(Eigen::umeyama(src, dst, false));
}

AteReport ate(std::span<const Pose> estimate, std::span<const Pose> ground_truth) {
    require_same_length(estimate.size(), ground_truth.size());
    if (estimate.size() < 3) {
        throw InsufficientDataError("ATE needs at least 3 poses, got " +
                                    std::to_string(estimate.size()));
    }
    std::vector<Vector3d> est_positions;
    std::vector<Vector3d> gt_positions;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        est_positions.push_back(estimate[i].translation);
        gt_positions.push_back(ground_truth[i].translation);
    }

    AteReport report;
    report.alignment = align_rigid(est_positions, gt_positions);
    double sum_t = 0.0;
    double sum_r = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        const Pose aligned = report.alignment * estimate[i];
        sum_t += (aligned.translation - ground_truth[i].translation).squaredNorm();
        const double angle =
            rotation_angle(ground_truth[i].rotation.transpose() * aligned.rotation);
        sum_r += angle * angle;
    }
    const double count = static_cast<double>(estimate.size());
    report.translation = std::sqrt(sum_t / count);
    report.rotation = std::sqrt(sum_r / count);
    return report;
}

void print_report(const RelativeErrorReport &relative, const AteReport &absolute,
                  std::ostream &out) {
    const auto flags = out.flags();
    out << std::fixed;
    out << "Relative error (" << relative.segments << " segments)\n";
    out << "  length[m]  segments  trans[%]  rot[deg/m]\n";
    for (const auto &b : relative.per_length) {
        out << std::setw(11) << std::setprecision(0) << b.length << std::setw(10) << b.segments
            << std::setw(10) << std::setprecision(4) << b.translational_percent << std::setw(12)
            << std::setprecision(6) << b.rotational_deg_per_m << '\n';
    }
    if (relative.no_segments()) {
        out << "  trajectory too short for any segment\n";
    } else {
        out << "  average: " << std::setprecision(4) << relative.avg_translational_percent
            << " % / " << std::setprecision(6) << relative.avg_rotational_deg_per_m
            << " deg/m\n";
    }
    out << "Absolute trajectory error\n";
    out << "  translation: " << std::setprecision(6) << absolute.translation << " m\n";
    out << "  rotation:    " << std::setprecision(6) << absolute.rotation << " rad\n";
    out.flags(flags);
}

void write_report_csv(const RelativeErrorReport &relative, const AteReport &absolute,
                      std::ostream &out) {
    out << "metric,length,segments,value\n";
    for (const auto &b : relative.per_length) {
        out << "rel_trans_percent," << b.length << ',' << b.segments << ','
            << b.translational_percent << '\n';
        out << "rel_rot_deg_per_m," << b.length << ',' << b.segments << ','
            << b.rotational_deg_per_m << '\n';
    }
    out << "rel_trans_percent,all," << relative.segments << ','
        << relative.avg_translational_percent << '\n';
    out << "rel_rot_deg_per_m,all," << relative.segments << ','
        << relative.avg_rotational_deg_per_m << '\n';
    out << "ate_translation_m,,," << absolute.translation << '\n';
    out << "ate_rotation_rad,,," << absolute.rotation << '\n';
}

}  // namespace lidar_odom
