// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <deque>
#include <sstream>

#include "lidar_odom/eval.hpp"
#include "lidar_odom/pipeline.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace lidar_odom {
namespace {

using testing::Rng;

// Replays prepared scans; throws when it reaches `fail_at`.
class VectorSource : public FrameSource {
public:
    explicit VectorSource(std::vector<Scan> scans, std::size_t fail_at = SIZE_MAX)
        : scans_(scans.begin(), scans.end()), fail_at_(fail_at) {}
    std::optional<Scan> next() override {
        if (served_ == fail_at_) throw FormatError("truncated record");
        if (scans_.empty()) return std::nullopt;
        Scan s = std::move(scans_.front());
        scans_.pop_front();
        ++served_;
        return s;
    }

private:
    std::deque<Scan> scans_;
    std::size_t fail_at_;
    std::size_t served_ = 0;
};

Config small_config() {
    Config c;
    c.r_max = 50.0;
    c.r_min = 2.0;
    return c;
}

Frame static_frame(const PointCloud &points) {
    Frame f;
    for (std::size_t i = 0; i < points.size(); ++i) {
        f.points.push_back({points[i], 0.1 * static_cast<double>(i) / points.size()});
    }
    return f;
}

PointCloud world_scan(std::uint64_t seed, std::size_t count, double r_min, double r_max) {
    const testing::SyntheticWorld world(11);
    Rng rng(seed);
    return range_filter(world.sample(count, rng), r_min, r_max);
}

TEST(Config, Defaults) {
    const Config c;
    EXPECT_EQ(c.tau_0, 2.0);
    EXPECT_EQ(c.delta_min, 0.1);
    EXPECT_EQ(c.n_max, 20u);
    EXPECT_EQ(c.alpha, 0.5);
    EXPECT_EQ(c.beta, 1.5);
    EXPECT_EQ(c.gamma, 1e-4);
    EXPECT_DOUBLE_EQ(c.voxel_size(), 1.0);
    EXPECT_EQ(c.deskew_reference, DeskewReference::kMidSweep);
    EXPECT_DOUBLE_EQ(c.deskew_reference_stamp(), 0.05);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, DeskewReference) {
    Config c = parse_config("deskew_reference = start\n");
    EXPECT_EQ(c.deskew_reference, DeskewReference::kSweepStart);
    EXPECT_EQ(c.deskew_reference_stamp(), 0.0);
    EXPECT_EQ(to_string(c.deskew_reference), "start");
    c = parse_config("deskew_reference = mid\n", c);
    EXPECT_EQ(to_string(c.deskew_reference), "mid");
    EXPECT_THROW(parse_config("deskew_reference = end\n"), std::invalid_argument);
}

TEST(Config, ParsesKeyValueText) {
    const Config c = parse_config(
        "# sensor\nr_max = 50\nr_min=1.5  # comment\n\ndeskew_enabled = false\n"
        "kernel_scale_mode = sigma_over_3_squared\n");
    EXPECT_EQ(c.r_max, 50.0);
    EXPECT_EQ(c.r_min, 1.5);
    EXPECT_FALSE(c.deskew_enabled);
    EXPECT_EQ(c.kernel_scale_mode, KernelScaleMode::kSigmaOverThreeSquared);
    EXPECT_DOUBLE_EQ(c.voxel_size(), 0.5);
}

TEST(Config, ReportsLineOfBadEntry) {
    try {
        parse_config("r_max = 50\n\nbogus = 1\n");
        FAIL();
    } catch (const std::invalid_argument &e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_config("r_max = fifty\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("r_max 50\n"), std::invalid_argument);
}

TEST(Config, ValidateRejectsInconsistentValues) {
    Config c;
    c.r_min = 200.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = Config{};
    c.dt = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = Config{};
    c.n_max = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = Config{};
    c.gamma = -1.0;
    EXPECT_THROW(OdometryPipeline{c}, std::invalid_argument);
}

TEST(Pipeline, FirstFrameIsIdentityAndSeedsMap) {
    OdometryPipeline pipeline(small_config());
    const Pose pose = pipeline.process_frame(static_frame(world_scan(1, 20000, 2.0, 50.0)));
    EXPECT_TRUE(pose.matrix().isIdentity(0.0));
    EXPECT_GT(pipeline.map().point_count(), 0u);
    EXPECT_EQ(pipeline.last_stats().status, RegistrationStatus::kEmptyMap);
    EXPECT_EQ(pipeline.last_stats().threshold, 2.0);
    EXPECT_EQ(pipeline.frame_index(), 1u);
}

TEST(Pipeline, StaticSensorStaysAtIdentity) {
    OdometryPipeline pipeline(small_config());
    const PointCloud points = world_scan(2, 20000, 2.0, 50.0);
    for (int i = 0; i < 5; ++i) {
        const Pose pose = pipeline.process_frame(static_frame(points));
        EXPECT_LT(testing::max_abs_diff(pose.matrix(), Matrix4d::Identity()), 1e-6);
    }
    EXPECT_EQ(pipeline.threshold_model().num_samples(), 0u);
}

TEST(Pipeline, EmptyAfterFilteringKeepsPreviousPose) {
    OdometryPipeline pipeline(small_config());
    pipeline.process_frame(static_frame(world_scan(3, 20000, 2.0, 50.0)));
    const std::size_t map_points = pipeline.map().point_count();
    const Pose pose = pipeline.process_frame(static_frame({{0.5, 0, 0}, {0, 1, 0}}));
    EXPECT_TRUE(pipeline.last_stats().skipped);
    EXPECT_EQ(pipeline.last_stats().filtered_points, 0u);
    EXPECT_TRUE(pose.matrix().isIdentity(0.0));
    EXPECT_EQ(pipeline.map().point_count(), map_points);
    EXPECT_EQ(pipeline.poses().size(), 2u);
}

class ShortSequence : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        const testing::SyntheticWorld world(21);
        std::vector<Pose> increments(12, testing::planar_increment(8.0, 0.2, 0.1));
        poses_ = testing::integrate(increments);
        frames_ = testing::simulate_sequence(world, poses_, 0.1, 5);
    }
    static std::vector<Pose> poses_;
    static std::vector<testing::SimulatedFrame> frames_;
};
std::vector<Pose> ShortSequence::poses_;
std::vector<testing::SimulatedFrame> ShortSequence::frames_;

TEST_F(ShortSequence, TracksGroundTruth) {
    // Poses refer to mid-sweep; frame 0 anchors the world, so compare motion between frames.
    // Frames 0 and 1 are not deskewed and seed the velocity used for frame 2, so the first
    // few increments carry a startup error.
    const auto truth = testing::mid_sweep_poses(poses_);
    OdometryPipeline pipeline(small_config());
    for (const auto &f : frames_) {
        pipeline.process_frame(f.frame);
        EXPECT_TRUE(pipeline.last_stats().converged);
    }
    const auto &est = pipeline.poses();
    for (std::size_t k = 2; k < est.size(); ++k) {
        const bool settled = k >= 4;
        const Pose got = est[k - 1].inverse() * est[k];
        const Pose want = truth[k - 1].inverse() * truth[k];
        EXPECT_LT((got.translation - want.translation).norm(), settled ? 0.05 : 0.15) << k;
        EXPECT_LT(rotation_angle(got.rotation.transpose() * want.rotation),
                  settled ? 2e-3 : 5e-3)
            << k;
    }
    EXPECT_LT(ate(est, truth).translation, 0.05);
}

TEST_F(ShortSequence, Deterministic) {
    OdometryPipeline a(small_config());
    OdometryPipeline b(small_config());
    for (const auto &f : frames_) {
        EXPECT_EQ(a.process_frame(f.frame).matrix(), b.process_frame(f.frame).matrix());
    }
}

TEST_F(ShortSequence, StatsAreConsistent) {
    OdometryPipeline pipeline(small_config());
    std::vector<FrameStats> stats;
    for (const auto &f : frames_) {
        pipeline.process_frame(f.frame);
        stats.push_back(pipeline.last_stats());
    }
    for (const auto &s : stats) {
        EXPECT_DOUBLE_EQ(s.sigma * 3.0, s.threshold);
        EXPECT_LE(s.registration_points, s.merge_points);
        EXPECT_LE(s.merge_points, s.filtered_points);
    }
    std::ostringstream csv;
    write_threshold_csv(stats, csv);
    const std::string text = csv.str();
    EXPECT_EQ(text.rfind("frame,deviation,sigma,tau\n", 0), 0u);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(stats.size() + 1));
}

std::vector<Scan> as_scans(const std::vector<testing::SimulatedFrame> &frames) {
    std::vector<Scan> scans;
    for (const auto &f : frames) {
        Scan s;
        for (const auto &p : f.frame.points) {
            s.points.push_back(p.position);
            s.stamps.push_back(p.stamp);
        }
        scans.push_back(std::move(s));
    }
    return scans;
}

TEST_F(ShortSequence, RunSequenceMatchesDirectProcessing) {
    const auto scans = as_scans(frames_);
    OdometryPipeline direct(small_config());
    FrameAssembler assemble(0.1, true);
    for (const auto &s : scans) direct.process_frame(assemble(s.points, s.stamps));

    VectorSource source(scans);
    OdometryPipeline pipeline(small_config());
    std::size_t notified = 0;
    const Trajectory trajectory =
        run_sequence(source, pipeline, {[&](std::size_t, const Pose &) { ++notified; }, {}});
    ASSERT_EQ(trajectory.size(), frames_.size());
    EXPECT_EQ(notified, frames_.size());
    for (std::size_t i = 0; i < frames_.size(); ++i) {
        EXPECT_EQ(trajectory[i].index, i);
        EXPECT_LT(testing::max_abs_diff(trajectory[i].pose.matrix(), direct.poses()[i].matrix()),
                  1e-9);
    }
}

TEST(RunSequence, EmptySource) {
    VectorSource source({});
    OdometryPipeline pipeline(small_config());
    EXPECT_TRUE(run_sequence(source, pipeline).empty());
}

TEST(RunSequence, FailureCarriesPartialTrajectory) {
    const PointCloud points = world_scan(4, 10000, 2.0, 50.0);
    std::vector<Scan> scans(4, Scan{points, {}, 0});
    VectorSource source(scans, 2);
    OdometryPipeline pipeline(small_config());
    try {
        run_sequence(source, pipeline);
        FAIL() << "expected SequenceError";
    } catch (const SequenceError &e) {
        EXPECT_EQ(e.frame_index(), 2u);
        EXPECT_EQ(e.partial().size(), 2u);
        EXPECT_NE(std::string(e.what()).find("truncated"), std::string::npos);
    }
}

}  // namespace
}  // namespace lidar_odom
