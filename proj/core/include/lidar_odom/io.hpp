// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lidar_odom/geometry.hpp"

namespace lidar_odom {

/// Raw points of one sweep as read from disk. `stamps` is empty when the file has none.
struct Scan {
    PointCloud points;
    std::vector<double> stamps;
    std::size_t dropped_nonfinite = 0;
};

/// Malformed input. `location` is a byte offset or a line number, depending on the format.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string &what) : std::runtime_error(what) {}
};

enum class ScanFormat { kKittiBin, kPly, kXyzCsv };

/// "kitti-bin", "ply" or "xyz". Throws std::invalid_argument otherwise.
ScanFormat parse_scan_format(std::string_view name);
std::string to_string(ScanFormat format);
std::optional<ScanFormat> format_from_extension(const std::filesystem::path &path);

/// Velodyne records of four little-endian float32 (x, y, z, intensity). Intensity is dropped.
Scan read_kitti_bin(const std::filesystem::path &path);
Scan parse_kitti_bin(std::span<const std::byte> bytes);

/// ascii or binary_little_endian PLY; vertex properties x, y, z and optional time/timestamp/t.
Scan read_ply(const std::filesystem::path &path);

/// Comma separated with a header naming x, y, z and optionally t/time/timestamp.
Scan read_xyz_csv(const std::filesystem::path &path);

Scan read_scan(const std::filesystem::path &path, ScanFormat format);

enum class PlyEncoding { kAscii, kBinaryLittleEndian };

/// Writes x, y, z as float64 vertex properties.
void write_ply(std::span<const Vector3d> points, const std::filesystem::path &path,
               PlyEncoding encoding = PlyEncoding::kBinaryLittleEndian);

/// Delivers scans in acquisition order. next() returns nullopt at the end.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual std::optional<Scan> next() = 0;
};

/// Reads one file per frame.
class FileListSource : public FrameSource {
public:
    FileListSource(std::vector<std::filesystem::path> files, ScanFormat format)
        : files_(std::move(files)), format_(format) {}

    std::optional<Scan> next() override;
    std::size_t size() const { return files_.size(); }
    const std::vector<std::filesystem::path> &files() const { return files_; }

private:
    std::vector<std::filesystem::path> files_;
    ScanFormat format_;
    std::size_t cursor_ = 0;
};

/// A directory (files with the format's extension, sorted by name), a glob pattern
/// (sorted) or a single file.
std::vector<std::filesystem::path> resolve_inputs(const std::string &input, ScanFormat format);

struct TrajectoryEntry {
    std::size_t index;
    Pose pose;
};

/// Poses keyed by strictly increasing frame index.
class Trajectory {
public:
    /// Throws std::invalid_argument when `index` does not increase.
    void push_back(std::size_t index, const Pose &pose);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<TrajectoryEntry> &entries() const { return entries_; }
    const TrajectoryEntry &operator[](std::size_t i) const { return entries_[i]; }
    std::vector<Pose> poses() const;

private:
    std::vector<TrajectoryEntry> entries_;
};

/// Twelve values per line: the row-major upper 3x4 of the pose matrix.
void write_trajectory_kitti(const Trajectory &trajectory, std::ostream &out);
void write_trajectory_kitti(const Trajectory &trajectory, const std::filesystem::path &path);

/// "stamp tx ty tz qx qy qz qw" with a unit Hamilton quaternion. One stamp per pose.
void write_trajectory_tum(const Trajectory &trajectory, std::span<const double> stamps,
                          std::ostream &out);
void write_trajectory_tum(const Trajectory &trajectory, std::span<const double> stamps,
                          const std::filesystem::path &path);

/// Throws FormatError with the offending line number.
Trajectory read_trajectory_kitti(std::istream &in);
Trajectory read_trajectory_kitti(const std::filesystem::path &path);
Trajectory read_trajectory_tum(std::istream &in, std::vector<double> *stamps = nullptr);
Trajectory read_trajectory_tum(const std::filesystem::path &path,
                               std::vector<double> *stamps = nullptr);

/// Shortest text that parses back to the same double; -0 prints as 0.
std::string format_double(double value);

}  // namespace lidar_odom
