// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#include "lidar_odom/registration.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace lidar_odom {

namespace {

constexpr std::size_t kChunk = 512;
constexpr std::size_t kMinCorrespondences = 6;
constexpr double kMaxCondition = 1e12;

std::size_t num_chunks(std::size_t n) { return (n + kChunk - 1) / kChunk; }

}  // namespace

std::vector<Correspondence> find_correspondences(std::span<const Vector3d> source,
                                                 const VoxelMap &map, double threshold) {
    const auto search = map.search(threshold);
    std::vector<std::optional<Neighbor>> found(source.size());
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, source.size(), kChunk),
                      [&](const tbb::blocked_range<std::size_t> &range) {
                          for (std::size_t i = range.begin(); i != range.end(); ++i) {
                              found[i] = search(source[i]);
                          }
                      });
    std::vector<Correspondence> out;
    out.reserve(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) {
        if (found[i]) out.push_back({source[i], found[i]->point, found[i]->distance});
    }
    return out;
}

double gm_loss(double e, double kappa) {
    const double e2 = e * e;
    return 0.5 * e2 / (kappa + e2);
}

double gm_weight(double e, double kappa) {
    const double denom = kappa + e * e;
    return kappa / (denom * denom);
}

double robust_objective(std::span<const Correspondence> correspondences, double kappa,
                        const Pose &perturbation) {
    double sum = 0.0;
    for (const auto &c : correspondences) {
        sum += gm_loss((perturbation * c.source - c.target).norm(), kappa);
    }
    return sum;
}

LinearSystem build_linear_system(std::span<const Correspondence> correspondences, double kappa) {
    const std::size_t n = correspondences.size();
    std::vector<LinearSystem> partial(num_chunks(n));
    tbb::parallel_for(std::size_t{0}, partial.size(), [&](std::size_t chunk) {
        LinearSystem &sys = partial[chunk];
        const std::size_t end = std::min(n, (chunk + 1) * kChunk);
        for (std::size_t i = chunk * kChunk; i < end; ++i) {
            const auto &c = correspondences[i];
            const Vector3d residual = c.source - c.target;
            Eigen::Matrix<double, 3, 6> jacobian;
            jacobian.leftCols<3>() = -hat(c.source);
            jacobian.rightCols<3>().setIdentity();
            const double w = gm_weight(residual.norm(), kappa);
            sys.hessian.noalias() += w * jacobian.transpose() * jacobian;
            sys.gradient.noalias() += w * jacobian.transpose() * residual;
        }
    });
    LinearSystem total;
    for (const auto &sys : partial) {
        total.hessian += sys.hessian;
        total.gradient += sys.gradient;
    }
    return total;
}

DegenerateSystemError::DegenerateSystemError(double condition, double min_eigenvalue,
                                             double max_eigenvalue)
    : std::runtime_error("degenerate ICP normal equations: condition number " +
                         std::to_string(condition) + " (eigenvalues " +
                         std::to_string(min_eigenvalue) + " .. " +
                         std::to_string(max_eigenvalue) + ")"),
      condition_(condition),
      min_eigenvalue_(min_eigenvalue),
      max_eigenvalue_(max_eigenvalue) {}

Vector6d solve_linear_system(const LinearSystem &system) {
    const Eigen::SelfAdjointEigenSolver<Matrix6d> eigen(system.hessian);
    const Vector6d lambda = eigen.eigenvalues();
    const double lo = lambda.minCoeff();
    const double hi = lambda.maxCoeff();
    if (!(hi > 0.0) || lo <= hi / kMaxCondition) {
        const double condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
        throw DegenerateSystemError(condition, lo, hi);
    }

    const Eigen::LLT<Matrix6d> llt(system.hessian);
    if (llt.info() == Eigen::Success) return llt.solve(-system.gradient);

    // Pseudo-inverse fallback
    Vector6d inv_lambda = Vector6d::Zero();
    for (int i = 0; i < 6; ++i) {
        if (lambda[i] > hi / kMaxCondition) inv_lambda[i] = 1.0 / lambda[i];
    }
    const Matrix6d &v = eigen.eigenvectors();
    return -(v * inv_lambda.asDiagonal() * v.transpose()) * system.gradient;
}

Vector6d gauss_newton_step(std::span<const Correspondence> correspondences, double kappa) {
    return solve_linear_system(build_linear_system(correspondences, kappa));
}

Pose step_to_pose(const Vector6d &step) {
    Pose pose;
    pose.rotation = exp_so3(step.head<3>());
    pose.translation = step.tail<3>();
    return pose;
}

RegistrationResult register_scan(std::span<const Vector3d> scan, const VoxelMap &map,
                                 const Pose &initial, const RegistrationOptions &options) {
    if (scan.empty()) throw std::invalid_argument("register_scan: empty scan");
    if (!(options.threshold > 0.0)) throw std::invalid_argument("register_scan: threshold <= 0");
    if (!(options.gamma > 0.0)) throw std::invalid_argument("register_scan: gamma <= 0");

    RegistrationResult result;
    if (map.empty()) {
        result.converged = true;
        result.status = RegistrationStatus::kEmptyMap;
        return result;
    }

    PointCloud source(scan.size());
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, scan.size(), kChunk),
                      [&](const tbb::blocked_range<std::size_t> &range) {
                          for (std::size_t i = range.begin(); i != range.end(); ++i) {
                              source[i] = initial * scan[i];
                          }
                      });

    while (result.iterations < options.max_iterations) {
        const auto correspondences = find_correspondences(source, map, options.threshold);
        result.final_correspondences = correspondences.size();
        if (correspondences.size() < kMinCorrespondences) {
            result.status = RegistrationStatus::kTooFewCorrespondences;
            return result;
        }

        Vector6d step;
        try {
            step = gauss_newton_step(correspondences, options.kernel_scale);
        } catch (const DegenerateSystemError &) {
            result.status = RegistrationStatus::kDegenerate;
            return result;
        }

        const Pose estimate = step_to_pose(step);
        tbb::parallel_for(tbb::blocked_range<std::size_t>(0, source.size(), kChunk),
                          [&](const tbb::blocked_range<std::size_t> &range) {
                              for (std::size_t i = range.begin(); i != range.end(); ++i) {
                                  source[i] = estimate * source[i];
                              }
                          });
        result.delta_icp = estimate * result.delta_icp;
        ++result.iterations;

        if (step.norm() < options.gamma) {
            result.converged = true;
            result.status = RegistrationStatus::kConverged;
            return result;
        }
    }
    result.status = RegistrationStatus::kIterationCap;
    return result;
}

std::string to_string(RegistrationStatus status) {
    switch (status) {
        case RegistrationStatus::kConverged: return "converged";
        case RegistrationStatus::kEmptyMap: return "empty_map";
        case RegistrationStatus::kTooFewCorrespondences: return "too_few_correspondences";
        case RegistrationStatus::kDegenerate: return "degenerate";
        case RegistrationStatus::kIterationCap: return "iteration_cap";
    }
    return "unknown";
}

}  // namespace lidar_odom
