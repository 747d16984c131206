// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "lidar_odom/eval.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace lidar_odom {
namespace {

using testing::Rng;

std::vector<Pose> straight_line(std::size_t n, double step) {
    std::vector<Pose> poses(n);
    for (std::size_t i = 0; i < n; ++i) poses[i].translation = {step * i, 0, 0};
    return poses;
}

std::vector<Pose> curvy(std::size_t n, std::uint64_t seed) {
    std::vector<Pose> increments;
    Rng rng(seed);
    std::uniform_real_distribution<double> yaw(-0.3, 0.3);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        increments.push_back(testing::planar_increment(10.0, yaw(rng), 0.1));
    }
    return testing::integrate(increments);
}

TEST(RelativeErrors, IdenticalTrajectoriesHaveNoError) {
    const auto gt = curvy(1200, 1);
    const auto report = relative_errors(gt, gt);
    EXPECT_GT(report.segments, 0u);
    EXPECT_LT(report.avg_translational_percent, 1e-9);
    EXPECT_LT(report.avg_rotational_deg_per_m, 1e-9);
}

TEST(RelativeErrors, UniformScaleGivesThatPercentage) {
    const auto gt = straight_line(1000, 1.0);
    const auto est = straight_line(1000, 1.01);
    const auto report = relative_errors(est, gt);
    EXPECT_NEAR(report.avg_translational_percent, 1.0, 1e-9);
    EXPECT_NEAR(report.avg_rotational_deg_per_m, 0.0, 1e-12);
    ASSERT_EQ(report.per_length.size(), 8u);
    // A segment of length L starts at every frame up to n - 1 - L.
    EXPECT_EQ(report.per_length[0].segments, 1000u - 100u);
    EXPECT_EQ(report.per_length[7].segments, 1000u - 800u);
}

TEST(RelativeErrors, RigidOffsetDoesNotMatter) {
    const auto gt = curvy(1000, 2);
    Rng rng(3);
    const Pose g = testing::random_pose(rng, 100.0);
    std::vector<Pose> est;
    for (const auto &p : gt) est.push_back(g * p);
    EXPECT_LT(relative_errors(est, gt).avg_translational_percent, 1e-9);
}

TEST(RelativeErrors, ConstantHeadingDrift) {
    const auto gt = straight_line(1000, 1.0);
    const double eps = 1e-4;
    std::vector<Pose> increments(999);
    for (auto &inc : increments) {
        inc.rotation = exp_so3({0, 0, eps});
        inc.translation = {1.0, 0, 0};
    }
    const auto est = testing::integrate(increments);
    const auto report = relative_errors(est, gt);
    EXPECT_NEAR(report.avg_rotational_deg_per_m, eps * 180.0 / std::numbers::pi, 1e-9);
}

TEST(RelativeErrors, TooShortHasNoSegments) {
    const auto gt = straight_line(50, 1.0);
    const auto report = relative_errors(gt, gt);
    EXPECT_TRUE(report.no_segments());
    EXPECT_EQ(report.avg_translational_percent, 0.0);
}

TEST(RelativeErrors, LengthMismatchNamesBothLengths) {
    try {
        relative_errors(straight_line(10, 1.0), straight_line(12, 1.0));
        FAIL();
    } catch (const std::invalid_argument &e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("10"), std::string::npos);
        EXPECT_NE(what.find("12"), std::string::npos);
    }
}

TEST(Ate, IdenticalIsZero) {
    const auto gt = curvy(200, 4);
    const auto report = ate(gt, gt);
    EXPECT_LT(report.translation, 1e-9);
    EXPECT_LT(report.rotation, 1e-7);
}

TEST(Ate, RemovesRigidOffset) {
    const auto gt = curvy(300, 5);
    Rng rng(6);
    const Pose g = testing::random_pose(rng, 100.0);
    std::vector<Pose> est;
    for (const auto &p : gt) est.push_back(g * p);
    const auto report = ate(est, gt);
    EXPECT_LT(report.translation, 1e-8);
    EXPECT_LT(report.rotation, 1e-7);
    EXPECT_LT(testing::max_abs_diff((report.alignment * g).matrix(), Matrix4d::Identity()), 1e-8);
}

TEST(Ate, MatchesPositionNoiseLevel) {
    const auto gt = curvy(20000, 7);
    Rng rng(8);
    std::normal_distribution<double> noise(0.0, 0.1 / std::sqrt(3.0));
    std::vector<Pose> est = gt;
    for (auto &p : est) p.translation += Vector3d(noise(rng), noise(rng), noise(rng));
    EXPECT_NEAR(ate(est, gt).translation, 0.1, 0.005);
}

TEST(Ate, NeedsThreePoses) {
    const auto gt = straight_line(2, 1.0);
    EXPECT_THROW(ate(gt, gt), InsufficientDataError);
}

TEST(AlignRigid, RecoversTransform) {
    Rng rng(9);
    const Pose g = testing::random_pose(rng, 20.0);
    PointCloud from;
    for (int i = 0; i < 50; ++i) from.push_back(10.0 * testing::random_unit(rng));
    const PointCloud to = transform_points(g, from);
    EXPECT_LT(testing::max_abs_diff(align_rigid(from, to).matrix(), g.matrix()), 1e-10);
}

TEST(Report, PrintsAndWritesCsv) {
    const auto gt = straight_line(1000, 1.0);
    const auto est = straight_line(1000, 1.01);
    std::ostringstream text, csv;
    print_report(relative_errors(est, gt), ate(est, gt), text);
    write_report_csv(relative_errors(est, gt), ate(est, gt), csv);
    EXPECT_NE(text.str().find("segments"), std::string::npos);
    EXPECT_FALSE(csv.str().empty());
}

}  // namespace
}  // namespace lidar_odom
