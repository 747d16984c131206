// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Core>
#include <vector>

namespace lidar_odom {

using Vector3d = Eigen::Vector3d;
using Matrix3d = Eigen::Matrix3d;
using Matrix4d = Eigen::Matrix4d;
using Rotation = Eigen::Matrix3d;
/// Axis-angle vector: direction is the rotation axis, norm the angle in radians.
using AxisAngle = Eigen::Vector3d;
using PointCloud = std::vector<Eigen::Vector3d>;

/// Below this angle (rad) exp/log switch to Taylor expansions of their coefficients.
inline constexpr double kSmallAngle = 1e-8;

/// Rigid transform in SE(3). Applied to a point as R p + t.
struct Pose {
    Rotation rotation = Rotation::Identity();
    Vector3d translation = Vector3d::Zero();

    static Pose Identity() { return {}; }
    static Pose FromMatrix(const Matrix4d &m);
    Matrix4d matrix() const;

    Pose inverse() const;
    Pose operator*(const Pose &other) const;
    Vector3d operator*(const Vector3d &p) const { return rotation * p + translation; }
};

Matrix3d hat(const Vector3d &w);
Vector3d vee(const Matrix3d &m);

/// Rodrigues formula.
Rotation exp_so3(const AxisAngle &w);

/// Principal-branch logarithm, ||result|| in [0, pi].
AxisAngle log_so3(const Rotation &r);

/// Rotation angle in [0, pi] taken from the trace, with the arccos argument clamped.
double rotation_angle(const Rotation &r);

inline Pose compose(const Pose &a, const Pose &b) { return a * b; }
inline Pose inverse(const Pose &a) { return a.inverse(); }
inline Vector3d transform_point(const Pose &a, const Vector3d &p) { return a * p; }

/// Applies `pose` to every point.
PointCloud transform_points(const Pose &pose, const PointCloud &points);

/// Projects a nearly-orthonormal matrix back onto SO(3).
Rotation orthonormalize(const Matrix3d &m);

}  // namespace lidar_odom
