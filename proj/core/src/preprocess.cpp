// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#include "lidar_odom/preprocess.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

#include "lidar_odom/voxel_coord.hpp"

namespace lidar_odom {

PointCloud deskew(const Frame &frame, const VelocityEstimate &velocity, double reference) {
    const auto &points = frame.points;
    PointCloud out(points.size());
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, points.size(), 4096),
                      [&](const tbb::blocked_range<std::size_t> &range) {
                          for (std::size_t i = range.begin(); i != range.end(); ++i) {
                              const double s = points[i].stamp - reference;
                              out[i] = exp_so3(s * velocity.angular) * points[i].position +
                                       s * velocity.linear;
                          }
                      });
    return out;
}

PointCloud voxel_downsample(std::span<const Vector3d> points, double voxel_size) {
    if (!(voxel_size > 0.0)) {
        throw std::invalid_argument("voxel_downsample: voxel_size must be positive");
    }
    std::unordered_set<VoxelCoord, VoxelCoordHash> occupied;
    occupied.reserve(points.size());
    PointCloud out;
    out.reserve(points.size());
    for (const auto &p : points) {
        if (occupied.insert(voxel_of(p, voxel_size)).second) out.push_back(p);
    }
    out.shrink_to_fit();
    return out;
}

DownsampledClouds double_downsample(std::span<const Vector3d> deskewed, const Config &config) {
    DownsampledClouds clouds;
    clouds.merge = voxel_downsample(deskewed, config.merge_voxel_size());
    clouds.registration = voxel_downsample(clouds.merge, config.registration_voxel_size());
    return clouds;
}

PointCloud range_filter(std::span<const Vector3d> points, double r_min, double r_max) {
    if (!(r_min >= 0.0 && r_min < r_max)) {
        throw std::invalid_argument("range_filter: need 0 <= r_min < r_max");
    }
    PointCloud out;
    out.reserve(points.size());
    std::copy_if(points.begin(), points.end(), std::back_inserter(out), [&](const Vector3d &p) {
        const double r = p.norm();
        return r >= r_min && r <= r_max;
    });
    return out;
}

std::vector<double> normalize_stamps(std::span<const double> stamps, double dt) {
    std::vector<double> out(stamps.size(), 0.0);
    if (stamps.empty()) return out;
    const auto [lo, hi] = std::minmax_element(stamps.begin(), stamps.end());
    const double span = *hi - *lo;
    if (!(span > 0.0)) return out;
    const double scale = dt / span;
    std::transform(stamps.begin(), stamps.end(), out.begin(), [&](double s) {
        return std::clamp((s - *lo) * scale, 0.0, dt);
    });
    return out;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_pi(double a) { return std::remainder(a, kTwoPi); }

double wrap_two_pi(double a) {
    const double r = std::fmod(a, kTwoPi);
    return r < 0.0 ? r + kTwoPi : r;
}

}  // namespace

std::vector<double> FrameAssembler::azimuth_stamps(const PointCloud &points) {
    std::vector<double> azimuth(points.size());
    std::transform(points.begin(), points.end(), azimuth.begin(),
                   [](const Vector3d &p) { return std::atan2(p.y(), p.x()); });

    if (!spin_direction_) {
        double swept = 0.0;
        for (std::size_t i = 1; i < azimuth.size(); ++i) {
            swept += wrap_pi(azimuth[i] - azimuth[i - 1]);
        }
        spin_direction_ = swept < 0.0 ? -1 : 1;
    }

    std::vector<double> stamps(points.size(), 0.0);
    if (points.empty()) return stamps;
    const double start = azimuth.front();
    const double direction = *spin_direction_;
    for (std::size_t i = 0; i < points.size(); ++i) {
        stamps[i] = wrap_two_pi(direction * (azimuth[i] - start)) / kTwoPi * dt_;
    }
    return stamps;
}

Frame FrameAssembler::operator()(const PointCloud &points, std::span<const double> stamps) {
    if (!stamps.empty() && stamps.size() != points.size()) {
        throw std::invalid_argument("FrameAssembler: stamp count does not match point count");
    }
    std::vector<double> normalized;
    if (!stamps.empty()) {
        normalized = normalize_stamps(stamps, dt_);
    } else if (synthesize_stamps_) {
        normalized = azimuth_stamps(points);
    } else {
        normalized.assign(points.size(), 0.0);
    }

    Frame frame;
    frame.dt = dt_;
    frame.points.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        frame.points[i] = {points[i], normalized[i]};
    }
    return frame;
}

}  // namespace lidar_odom
