// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#include "lidar_odom/io.hpp"

#include <glob.h>

#include <Eigen/Geometry>
#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace lidar_odom {

static_assert(std::endian::native == std::endian::little,
              "binary readers assume a little-endian host");

namespace {

std::vector<std::byte> read_bytes(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<std::byte> bytes(size);
    if (size > 0 && !in.read(reinterpret_cast<char *>(bytes.data()), static_cast<std::streamsize>(size))) {
        throw std::runtime_error("failed reading " + path.string());
    }
    return bytes;
}

template <typename T>
T load(const std::byte *p) {
    T value;
    std::memcpy(&value, p, sizeof(T));
    return value;
}

bool finite(const Vector3d &p) { return p.allFinite(); }

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char delim) {
    std::vector<std::string_view> out;
    while (true) {
        const auto pos = s.find(delim);
        out.push_back(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos) break;
        s = s.substr(pos + 1);
    }
    return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

bool parse_number(std::string_view token, double &out) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc{} && ptr == token.data() + token.size();
}

bool is_time_name(std::string_view name) {
    return name == "t" || name == "time" || name == "timestamp";
}

void push_point(Scan &scan, const Vector3d &p, std::optional<double> stamp) {
    if (!finite(p) || (stamp && !std::isfinite(*stamp))) {
        ++scan.dropped_nonfinite;
        return;
    }
    scan.points.push_back(p);
    if (stamp) scan.stamps.push_back(*stamp);
}

// PLY ------------------------------------------------------------------------------------

struct PlyProperty {
    std::string name;
    std::size_t size = 0;
    char kind = 'f';  // 'i' signed, 'u' unsigned, 'f' floating
};

std::optional<PlyProperty> ply_type(std::string_view type) {
    if (type == "char" || type == "int8") return PlyProperty{"", 1, 'i'};
    if (type == "uchar" || type == "uint8") return PlyProperty{"", 1, 'u'};
    if (type == "short" || type == "int16") return PlyProperty{"", 2, 'i'};
    if (type == "ushort" || type == "uint16") return PlyProperty{"", 2, 'u'};
    if (type == "int" || type == "int32") return PlyProperty{"", 4, 'i'};
    if (type == "uint" || type == "uint32") return PlyProperty{"", 4, 'u'};
    if (type == "float" || type == "float32") return PlyProperty{"", 4, 'f'};
    if (type == "double" || type == "float64") return PlyProperty{"", 8, 'f'};
    return std::nullopt;
}

double decode(const PlyProperty &prop, const std::byte *p) {
    switch (prop.kind) {
        case 'f': return prop.size == 4 ? load<float>(p) : load<double>(p);
        case 'i':
            switch (prop.size) {
                case 1: return load<std::int8_t>(p);
                case 2: return load<std::int16_t>(p);
                default: return load<std::int32_t>(p);
            }
        default:
            switch (prop.size) {
                case 1: return load<std::uint8_t>(p);
                case 2: return load<std::uint16_t>(p);
                default: return load<std::uint32_t>(p);
            }
    }
}

}  // namespace

ScanFormat parse_scan_format(std::string_view name) {
    if (name == "kitti-bin" || name == "bin") return ScanFormat::kKittiBin;
    if (name == "ply") return ScanFormat::kPly;
    if (name == "xyz" || name == "csv") return ScanFormat::kXyzCsv;
    throw std::invalid_argument("unknown scan format '" + std::string(name) +
                                "' (expected kitti-bin, ply or xyz)");
}

std::string to_string(ScanFormat format) {
    switch (format) {
        case ScanFormat::kKittiBin: return "kitti-bin";
        case ScanFormat::kPly: return "ply";
        case ScanFormat::kXyzCsv: return "xyz";
    }
    return "unknown";
}

std::optional<ScanFormat> format_from_extension(const std::filesystem::path &path) {
    const auto ext = path.extension().string();
    if (ext == ".bin") return ScanFormat::kKittiBin;
    if (ext == ".ply") return ScanFormat::kPly;
    if (ext == ".csv" || ext == ".xyz") return ScanFormat::kXyzCsv;
    return std::nullopt;
}

Scan parse_kitti_bin(std::span<const std::byte> bytes) {
    constexpr std::size_t kRecord = 4 * sizeof(float);
    if (bytes.size() % kRecord != 0) {
        const std::size_t offset = bytes.size() - bytes.size() % kRecord;
        throw FormatError("kitti bin: " + std::to_string(bytes.size() % kRecord) +
                          " trailing bytes at byte offset " + std::to_string(offset) +
                          " (size must be a multiple of 16)");
    }
    Scan scan;
    scan.points.reserve(bytes.size() / kRecord);
    for (std::size_t off = 0; off < bytes.size(); off += kRecord) {
        const Vector3d p(load<float>(&bytes[off]), load<float>(&bytes[off + 4]),
                         load<float>(&bytes[off + 8]));
        push_point(scan, p, std::nullopt);
    }
    return scan;
}

Scan read_kitti_bin(const std::filesystem::path &path) {
    const auto bytes = read_bytes(path);
    try {
        return parse_kitti_bin(bytes);
    } catch (const FormatError &e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

Scan read_ply(const std::filesystem::path &path) {
    const auto bytes = read_bytes(path);
    const std::string_view text(reinterpret_cast<const char *>(bytes.data()), bytes.size());
    const auto fail = [&](const std::string &msg) {
        throw FormatError(path.string() + ": ply: " + msg);
    };

    std::size_t pos = 0;
    const auto next_line = [&]() -> std::string_view {
        if (pos >= text.size()) fail("unexpected end of header");
        const auto eol = text.find('\n', pos);
        const auto line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        return trim(line);
    };

    if (next_line() != "ply") fail("missing 'ply' magic");
    bool binary = false;
    std::size_t vertex_count = 0;
    bool in_vertex = false;
    bool seen_vertex = false;
    bool vertex_first = true;
    std::vector<PlyProperty> props;
    while (true) {
        const auto tokens = split_ws(next_line());
        if (tokens.empty()) continue;
        if (tokens[0] == "end_header") break;
        if (tokens[0] == "comment" || tokens[0] == "obj_info") continue;
        if (tokens[0] == "format") {
            if (tokens.size() < 2) fail("bad format line");
            if (tokens[1] == "ascii") binary = false;
            else if (tokens[1] == "binary_little_endian") binary = true;
            else fail("unsupported encoding '" + std::string(tokens[1]) + "'");
        } else if (tokens[0] == "element") {
            if (tokens.size() < 3) fail("bad element line");
            in_vertex = tokens[1] == "vertex";
            if (in_vertex) {
                seen_vertex = true;
                double count = 0;
                if (!parse_number(tokens[2], count) || count < 0) fail("bad vertex count");
                vertex_count = static_cast<std::size_t>(count);
            } else if (!seen_vertex) {
                vertex_first = false;
            }
        } else if (tokens[0] == "property") {
            if (!in_vertex) continue;
            if (tokens.size() < 3) fail("bad property line");
            if (tokens[1] == "list") fail("list properties are not supported on vertices");
            auto prop = ply_type(tokens[1]);
            if (!prop) fail("unknown property type '" + std::string(tokens[1]) + "'");
            prop->name = std::string(tokens[2]);
            props.push_back(*prop);
        }
    }
    if (!seen_vertex) fail("missing vertex element");
    if (binary && !vertex_first) fail("binary files must list the vertex element first");

    const auto index_of = [&](auto pred) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < props.size(); ++i) {
            if (pred(props[i].name)) return i;
        }
        return std::nullopt;
    };
    std::size_t xyz[3];
    const char *names[3] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
        const auto idx = index_of([&](const std::string &n) { return n == names[a]; });
        if (!idx) fail(std::string("missing vertex property '") + names[a] + "'");
        xyz[a] = *idx;
    }
    const auto time_idx = index_of([](const std::string &n) { return is_time_name(n); });

    Scan scan;
    scan.points.reserve(vertex_count);
    if (binary) {
        std::vector<std::size_t> offsets(props.size());
        std::size_t stride = 0;
        for (std::size_t i = 0; i < props.size(); ++i) {
            offsets[i] = stride;
            stride += props[i].size;
        }
        if (bytes.size() - pos < vertex_count * stride) {
            fail("truncated vertex data at byte offset " + std::to_string(pos));
        }
        for (std::size_t v = 0; v < vertex_count; ++v) {
            const std::byte *row = bytes.data() + pos + v * stride;
            const Vector3d p(decode(props[xyz[0]], row + offsets[xyz[0]]),
                             decode(props[xyz[1]], row + offsets[xyz[1]]),
                             decode(props[xyz[2]], row + offsets[xyz[2]]));
            std::optional<double> stamp;
            if (time_idx) stamp = decode(props[*time_idx], row + offsets[*time_idx]);
            push_point(scan, p, stamp);
        }
    } else {
        for (std::size_t v = 0; v < vertex_count; ++v) {
            const auto tokens = split_ws(next_line());
            if (tokens.size() < props.size()) {
                fail("vertex " + std::to_string(v) + " has " + std::to_string(tokens.size()) +
                     " values, expected " + std::to_string(props.size()));
            }
            double values[4] = {0, 0, 0, 0};
            const std::size_t cols[4] = {xyz[0], xyz[1], xyz[2], time_idx.value_or(0)};
            for (int c = 0; c < (time_idx ? 4 : 3); ++c) {
                if (!parse_number(tokens[cols[c]], values[c])) {
                    fail("vertex " + std::to_string(v) + ": bad number '" +
                         std::string(tokens[cols[c]]) + "'");
                }
            }
            push_point(scan, {values[0], values[1], values[2]},
                       time_idx ? std::optional<double>(values[3]) : std::nullopt);
        }
    }
    return scan;
}

Scan read_xyz_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    const auto fail = [&](std::size_t line, const std::string &msg) {
        throw FormatError(path.string() + ":" + std::to_string(line) + ": " + msg);
    };

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string_view> header;
    std::string header_line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header_line = line;
            break;
        }
    }
    if (header_line.empty()) return {};
    header = split(header_line, ',');

    std::optional<std::size_t> cols[4];
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "x") cols[0] = i;
        else if (header[i] == "y") cols[1] = i;
        else if (header[i] == "z") cols[2] = i;
        else if (is_time_name(header[i])) cols[3] = i;
    }
    const char *names[3] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
        if (!cols[a]) fail(line_no, std::string("missing column '") + names[a] + "'");
    }

    Scan scan;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != header.size()) {
            fail(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                              std::to_string(fields.size()));
        }
        double values[4] = {0, 0, 0, 0};
        for (int c = 0; c < 4; ++c) {
            if (!cols[c]) continue;
            if (!parse_number(fields[*cols[c]], values[c])) {
                fail(line_no, "bad number '" + std::string(fields[*cols[c]]) + "'");
            }
        }
        push_point(scan, {values[0], values[1], values[2]},
                   cols[3] ? std::optional<double>(values[3]) : std::nullopt);
    }
    return scan;
}

Scan read_scan(const std::filesystem::path &path, ScanFormat format) {
    switch (format) {
        case ScanFormat::kKittiBin: return read_kitti_bin(path);
        case ScanFormat::kPly: return read_ply(path);
        case ScanFormat::kXyzCsv: return read_xyz_csv(path);
    }
    throw std::invalid_argument("read_scan: bad format");
}

void write_ply(std::span<const Vector3d> points, const std::filesystem::path &path,
               PlyEncoding encoding) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "ply\nformat "
        << (encoding == PlyEncoding::kAscii ? "ascii" : "binary_little_endian")
        << " 1.0\nelement vertex " << points.size()
        << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
    if (encoding == PlyEncoding::kAscii) {
        for (const auto &p : points) {
            out << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
                << format_double(p.z()) << '\n';
        }
    } else {
        for (const auto &p : points) {
            const double xyz[3] = {p.x(), p.y(), p.z()};
            out.write(reinterpret_cast<const char *>(xyz), sizeof(xyz));
        }
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::optional<Scan> FileListSource::next() {
    if (cursor_ >= files_.size()) return std::nullopt;
    return read_scan(files_[cursor_++], format_);
}

std::vector<std::filesystem::path> resolve_inputs(const std::string &input, ScanFormat format) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    if (fs::is_directory(input)) {
        for (const auto &entry : fs::directory_iterator(input)) {
            if (entry.is_regular_file() && format_from_extension(entry.path()) == format) {
                files.push_back(entry.path());
            }
        }
    } else if (fs::is_regular_file(input)) {
        files.push_back(input);
    } else {
        glob_t matches{};
        if (::glob(input.c_str(), 0, nullptr, &matches) == 0) {
            for (std::size_t i = 0; i < matches.gl_pathc; ++i) {
                if (fs::is_regular_file(matches.gl_pathv[i])) files.emplace_back(matches.gl_pathv[i]);
            }
        }
        ::globfree(&matches);
    }
    std::sort(files.begin(), files.end());
    return files;
}

// Trajectories ---------------------------------------------------------------------------

void Trajectory::push_back(std::size_t index, const Pose &pose) {
    if (!entries_.empty() && index <= entries_.back().index) {
        throw std::invalid_argument("Trajectory: frame index " + std::to_string(index) +
                                    " does not follow " + std::to_string(entries_.back().index));
    }
    entries_.push_back({index, pose});
}

std::vector<Pose> Trajectory::poses() const {
    std::vector<Pose> out;
    out.reserve(entries_.size());
    for (const auto &e : entries_) out.push_back(e.pose);
    return out;
}

std::string format_double(double value) {
    if (value == 0.0) value = 0.0;
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

void write_trajectory_kitti(const Trajectory &trajectory, std::ostream &out) {
    for (const auto &entry : trajectory.entries()) {
        const Matrix4d m = entry.pose.matrix();
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 4; ++c) {
                if (r + c > 0) out << ' ';
                out << format_double(m(r, c));
            }
        }
        out << '\n';
    }
}

void write_trajectory_kitti(const Trajectory &trajectory, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_trajectory_kitti(trajectory, out);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_trajectory_tum(const Trajectory &trajectory, std::span<const double> stamps,
                          std::ostream &out) {
    if (stamps.size() != trajectory.size()) {
        throw std::invalid_argument("write_trajectory_tum: need one stamp per pose");
    }
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        const Pose &pose = trajectory[i].pose;
        Eigen::Quaterniond q(pose.rotation);
        q.normalize();
        if (q.w() < 0.0) q.coeffs() = -q.coeffs();
        out << format_double(stamps[i]) << ' ' << format_double(pose.translation.x()) << ' '
            << format_double(pose.translation.y()) << ' ' << format_double(pose.translation.z())
            << ' ' << format_double(q.x()) << ' ' << format_double(q.y()) << ' '
            << format_double(q.z()) << ' ' << format_double(q.w()) << '\n';
    }
}

void write_trajectory_tum(const Trajectory &trajectory, std::span<const double> stamps,
                          const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_trajectory_tum(trajectory, stamps, out);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

namespace {

template <typename RowFn>
void for_each_row(std::istream &in, std::size_t expected, RowFn &&fn) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> values(expected);
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto tokens = split_ws(body);
        if (tokens.size() != expected) {
            throw FormatError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(expected) + " values, got " +
                              std::to_string(tokens.size()));
        }
        for (std::size_t i = 0; i < expected; ++i) {
            if (!parse_number(tokens[i], values[i]) || !std::isfinite(values[i])) {
                throw FormatError("line " + std::to_string(line_no) + ": bad number '" +
                                  std::string(tokens[i]) + "'");
            }
        }
        fn(values);
    }
}

std::ifstream open_for_read(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

}  // namespace

Trajectory read_trajectory_kitti(std::istream &in) {
    Trajectory trajectory;
    std::size_t index = 0;
    for_each_row(in, 12, [&](const std::vector<double> &v) {
        Pose pose;
        pose.rotation << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
        pose.translation << v[3], v[7], v[11];
        trajectory.push_back(index++, pose);
    });
    return trajectory;
}

Trajectory read_trajectory_kitti(const std::filesystem::path &path) {
    auto in = open_for_read(path);
    try {
        return read_trajectory_kitti(in);
    } catch (const FormatError &e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

Trajectory read_trajectory_tum(std::istream &in, std::vector<double> *stamps) {
    Trajectory trajectory;
    std::size_t index = 0;
    for_each_row(in, 8, [&](const std::vector<double> &v) {
        Eigen::Quaterniond q(v[7], v[4], v[5], v[6]);
        if (q.norm() == 0.0) throw FormatError("zero quaternion in row " + std::to_string(index));
        q.normalize();
        Pose pose;
        pose.rotation = q.toRotationMatrix();
        pose.translation << v[1], v[2], v[3];
        if (stamps != nullptr) stamps->push_back(v[0]);
        trajectory.push_back(index++, pose);
    });
    return trajectory;
}

Trajectory read_trajectory_tum(const std::filesystem::path &path, std::vector<double> *stamps) {
    auto in = open_for_read(path);
    try {
        return read_trajectory_tum(in, stamps);
    } catch (const FormatError &e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace lidar_odom
