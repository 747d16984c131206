// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#include "lidar_odom/geometry.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace lidar_odom {

Pose Pose::FromMatrix(const Matrix4d &m) {
    Pose pose;
    pose.rotation = m.topLeftCorner<3, 3>();
    pose.translation = m.topRightCorner<3, 1>();
    return pose;
}

Matrix4d Pose::matrix() const {
    Matrix4d m = Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
}

Pose Pose::inverse() const {
    Pose inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(inv.rotation * translation);
    return inv;
}

Pose Pose::operator*(const Pose &other) const {
    Pose out;
    out.rotation = rotation * other.rotation;
    out.translation = rotation * other.translation + translation;
    return out;
}

Matrix3d hat(const Vector3d &w) {
    Matrix3d m;
    // clang-format off
    m <<     0, -w.z(),  w.y(),
         w.z(),      0, -w.x(),
        -w.y(),  w.x(),      0;
    // clang-format on
    return m;
}

Vector3d vee(const Matrix3d &m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

Rotation exp_so3(const AxisAngle &w) {
    const double theta2 = w.squaredNorm();
    const double theta = std::sqrt(theta2);
    double a = 0.0;
    double b = 0.0;
    if (theta < kSmallAngle) {
        a = 1.0 - theta2 / 6.0;
        b = 0.5 - theta2 / 24.0;
    } else {
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / theta2;
    }
    const Matrix3d k = hat(w);
    return Rotation::Identity() + a * k + b * k * k;
}

AxisAngle log_so3(const Rotation &r) {
    // 2 sin(theta) * axis
    const Vector3d skew = vee(r - r.transpose());
    const double sin_theta = 0.5 * skew.norm();
    const double cos_theta = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
    const double theta = std::atan2(sin_theta, cos_theta);

    if (theta < kSmallAngle) {
        return 0.5 * (1.0 + theta * theta / 6.0) * skew;
    }
    if (cos_theta > -0.99) {
        return (theta / (2.0 * sin_theta)) * skew;
    }

    // Near pi the skew part vanishes. The symmetric part equals
    // cos(theta) I + (1 - cos(theta)) a a^T, so the axis comes from its diagonal.
    const Matrix3d outer = (0.5 * (r + r.transpose()) - cos_theta * Matrix3d::Identity()) /
                           (1.0 - cos_theta);
    Eigen::Index k = 0;
    outer.diagonal().maxCoeff(&k);
    Vector3d axis = outer.col(k) / std::sqrt(outer(k, k));
    axis.normalize();
    if (axis.dot(skew) < 0.0) axis = -axis;
    return theta * axis;
}

double rotation_angle(const Rotation &r) {
    return std::acos(std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0));
}

PointCloud transform_points(const Pose &pose, const PointCloud &points) {
    PointCloud out;
    out.reserve(points.size());
    std::transform(points.cbegin(), points.cend(), std::back_inserter(out),
                   [&](const Vector3d &p) { return pose * p; });
    return out;
}

Rotation orthonormalize(const Matrix3d &m) {
    Eigen::JacobiSVD<Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix3d d = Matrix3d::Identity();
    d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    return svd.matrixU() * d * svd.matrixV().transpose();
}

}  // namespace lidar_odom
