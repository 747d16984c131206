// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lidar_odom/geometry.hpp"
#include "lidar_odom/voxel_map.hpp"

namespace lidar_odom {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

struct Correspondence {
    Vector3d source;
    Vector3d target;
    double distance;
};

/// Nearest map point within `threshold` for every source point, in source order.
/// Sources without a neighbor are dropped.
std::vector<Correspondence> find_correspondences(std::span<const Vector3d> source,
                                                 const VoxelMap &map, double threshold);

/// Geman-McClure loss rho(e) = (e^2 / 2) / (kappa + e^2).
double gm_loss(double e, double kappa);

/// IRLS weight rho'(e) / e = kappa / (kappa + e^2)^2.
double gm_weight(double e, double kappa);

/// Sum of gm_loss over the correspondences after applying `perturbation` to the sources.
double robust_objective(std::span<const Correspondence> correspondences, double kappa,
                        const Pose &perturbation = Pose::Identity());

/// Weighted normal equations H x = -g for a left perturbation (Exp(w), t) of the sources,
/// ordered (w, t). g is the gradient of robust_objective at the identity.
struct LinearSystem {
    Matrix6d hessian = Matrix6d::Zero();
    Vector6d gradient = Vector6d::Zero();
};

/// Accumulated over fixed-size chunks that are combined in order, so the result does not
/// depend on the number of threads.
LinearSystem build_linear_system(std::span<const Correspondence> correspondences, double kappa);

/// Raised when the normal equations are too ill-conditioned to solve.
class DegenerateSystemError : public std::runtime_error {
public:
    DegenerateSystemError(double condition, double min_eigenvalue, double max_eigenvalue);
    double condition() const { return condition_; }
    double min_eigenvalue() const { return min_eigenvalue_; }
    double max_eigenvalue() const { return max_eigenvalue_; }

private:
    double condition_;
    double min_eigenvalue_;
    double max_eigenvalue_;
};

/// One robust Gauss-Newton step (w, t). Throws DegenerateSystemError.
Vector6d gauss_newton_step(std::span<const Correspondence> correspondences, double kappa);

/// Solves an already built system; exposed for tests.
Vector6d solve_linear_system(const LinearSystem &system);

/// Left-multiplied rigid transform corresponding to a step.
Pose step_to_pose(const Vector6d &step);

struct RegistrationOptions {
    double threshold = 2.0;     // tau
    double kernel_scale = 2.0 / 9.0;  // kappa
    double gamma = 1e-4;
    std::size_t max_iterations = 500;
};

enum class RegistrationStatus {
    kConverged,
    kEmptyMap,
    kTooFewCorrespondences,
    kDegenerate,
    kIterationCap,
};

struct RegistrationResult {
    Pose delta_icp = Pose::Identity();
    std::size_t iterations = 0;
    std::size_t final_correspondences = 0;
    bool converged = false;
    RegistrationStatus status = RegistrationStatus::kConverged;
};

/// Aligns `scan` (sensor frame) to `map` starting from `initial`. The correction is applied
/// in the map frame, so the refined pose is delta_icp * initial.
///
/// An empty map yields identity with converged = true. Fewer than six correspondences or a
/// degenerate system stop the loop with converged = false and the correction so far.
/// Throws std::invalid_argument on an empty scan or non-positive threshold/gamma.
RegistrationResult register_scan(std::span<const Vector3d> scan, const VoxelMap &map,
                                 const Pose &initial, const RegistrationOptions &options);

std::string to_string(RegistrationStatus status);

}  // namespace lidar_odom
