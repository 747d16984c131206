// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#include "lidar_odom/voxel_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lidar_odom {

namespace {

// Voxel assignment uses floor(p / v), which can misplace a point lying within rounding
// distance of a face. Gaps are shrunk by this fraction of v so such points are never
// skipped.
constexpr double kFaceSlack = 1e-9;

// Blocks are 2^3 = 8 voxels wide; searches wider than kMaxOffsetRadius go through them.
constexpr int kBlockShift = 3;
constexpr int kMaxOffsetRadius = 2;

VoxelCoord block_of(const VoxelCoord &c) {
    return {c.i >> kBlockShift, c.j >> kBlockShift, c.k >> kBlockShift};
}

}  // namespace

VoxelMap::VoxelMap(double voxel_size, double max_range, std::size_t max_points)
    : voxel_size_(voxel_size), max_range_(max_range), max_points_(max_points) {
    if (!(voxel_size > 0.0)) throw std::invalid_argument("VoxelMap: voxel_size must be > 0");
    if (!(max_range > 0.0)) throw std::invalid_argument("VoxelMap: max_range must be > 0");
    if (max_points == 0) throw std::invalid_argument("VoxelMap: max_points must be >= 1");
}

void VoxelMap::insert(std::span<const Vector3d> points) {
    for (const auto &p : points) {
        auto &bucket = voxels_[voxel_of(p, voxel_size_)];
        if (bucket.size() < max_points_) {
            if (bucket.empty()) {
                bucket.reserve(max_points_);
                const VoxelCoord coord = voxel_of(p, voxel_size_);
                blocks_[block_of(coord)].push_back(coord);
            }
            bucket.push_back(p);
            ++num_points_;
        }
    }
}

void VoxelMap::remove_far(const Vector3d &origin) {
    const double max_range2 = max_range_ * max_range_;
    std::erase_if(voxels_, [&](const auto &entry) {
        if ((entry.second.front() - origin).squaredNorm() > max_range2) {
            num_points_ -= entry.second.size();
            const auto block = blocks_.find(block_of(entry.first));
            std::erase(block->second, entry.first);
            if (block->second.empty()) blocks_.erase(block);
            return true;
        }
        return false;
    });
}

void VoxelMap::clear() {
    voxels_.clear();
    blocks_.clear();
    num_points_ = 0;
}

const VoxelMap::Bucket *VoxelMap::find(const VoxelCoord &coord) const {
    const auto it = voxels_.find(coord);
    return it == voxels_.end() ? nullptr : &it->second;
}

PointCloud VoxelMap::points() const {
    PointCloud out;
    out.reserve(num_points_);
    for (const auto &[coord, bucket] : voxels_) out.insert(out.end(), bucket.begin(), bucket.end());
    return out;
}

std::optional<Neighbor> VoxelMap::nearest_neighbor(const Vector3d &query, double max_dist) const {
    return search(max_dist)(query);
}

VoxelMap::Search::Search(const VoxelMap &map, double max_dist) : map_(&map), max_dist_(max_dist) {
    if (!(max_dist > 0.0)) throw std::invalid_argument("nearest_neighbor: max_dist must be > 0");
    const double v = map.voxel_size_;
    const double r = std::ceil(max_dist / v);
    if (r > 1e6) throw std::invalid_argument("nearest_neighbor: max_dist too large for voxel size");
    const int radius = static_cast<int>(r);
    radius_ = radius;
    if (radius > kMaxOffsetRadius) return;
    const auto gap = [v](int d) { return std::max(std::abs(d) - 1, 0) * v; };

    const int side = 2 * radius + 1;
    offsets_.reserve(static_cast<std::size_t>(side) * side * side);
    int rank = 0;
    for (int di = -radius; di <= radius; ++di) {
        for (int dj = -radius; dj <= radius; ++dj) {
            for (int dk = -radius; dk <= radius; ++dk) {
                const double lb = std::sqrt(gap(di) * gap(di) + gap(dj) * gap(dj) +
                                            gap(dk) * gap(dk));
                offsets_.push_back({di, dj, dk, rank++, lb});
            }
        }
    }
    std::stable_sort(offsets_.begin(), offsets_.end(), [](const Offset &a, const Offset &b) {
        return a.lower_bound < b.lower_bound;
    });
}

std::optional<Neighbor> VoxelMap::Search::operator()(const Vector3d &query) const {
    return offsets_.empty() ? scan_blocks(query) : scan_offsets(query);
}

std::optional<Neighbor> VoxelMap::Search::scan_offsets(const Vector3d &query) const {
    const double v = map_->voxel_size_;
    const double slack = kFaceSlack * v;
    const VoxelCoord center = voxel_of(query, v);
    // Position of the query inside its voxel, per axis.
    const Vector3d local(query.x() - static_cast<double>(center.i) * v,
                         query.y() - static_cast<double>(center.j) * v,
                         query.z() - static_cast<double>(center.k) * v);
    const auto axis_gap = [&](int d, double q) {
        double g = 0.0;
        if (d > 0) g = d * v - q;
        else if (d < 0) g = q - (d + 1) * v;
        return std::max(g - slack, 0.0);
    };

    const double max_dist2 = max_dist_ * max_dist_;
    double best_d2 = std::numeric_limits<double>::infinity();
    int best_rank = std::numeric_limits<int>::max();
    const Vector3d *best = nullptr;

    for (const auto &off : offsets_) {
        const double lb = std::max(off.lower_bound - slack, 0.0);
        if (lb * lb > best_d2 || lb > max_dist_ + slack) break;
        const double gx = axis_gap(off.di, local.x());
        const double gy = axis_gap(off.dj, local.y());
        const double gz = axis_gap(off.dk, local.z());
        const double box_d2 = gx * gx + gy * gy + gz * gz;
        if (box_d2 > best_d2 || box_d2 > max_dist2 * (1.0 + 1e-12) + slack) continue;

        const Bucket *bucket =
            map_->find({center.i + off.di, center.j + off.dj, center.k + off.dk});
        if (bucket == nullptr) continue;
        for (const auto &p : *bucket) {
            const double d2 = (p - query).squaredNorm();
            if (d2 < best_d2 || (d2 == best_d2 && off.rank < best_rank)) {
                best_d2 = d2;
                best_rank = off.rank;
                best = &p;
            }
        }
    }

    if (best == nullptr) return std::nullopt;
    const double distance = std::sqrt(best_d2);
    if (distance > max_dist_) return std::nullopt;
    return Neighbor{*best, distance};
}

// Same result as scan_offsets: candidates are the voxels within Chebyshev radius of the
// query's voxel, compared by (squared distance, offset rank, insertion order). Only the
// visiting order differs, which the full comparison makes irrelevant.
std::optional<Neighbor> VoxelMap::Search::scan_blocks(const Vector3d &query) const {
    const double v = map_->voxel_size_;
    const double slack = kFaceSlack * v;
    const double block_size = v * (1 << kBlockShift);
    const VoxelCoord center = voxel_of(query, v);
    const VoxelCoord lo{center.i - radius_, center.j - radius_, center.k - radius_};
    const VoxelCoord hi{center.i + radius_, center.j + radius_, center.k + radius_};
    const VoxelCoord block_lo = block_of(lo);
    const VoxelCoord block_hi = block_of(hi);
    const std::int64_t side = 2 * static_cast<std::int64_t>(radius_) + 1;

    // Distance from the query to the cell range [first, last] along one axis, given the
    // cell size; shrunk by the slack like the per-voxel bounds.
    const auto range_gap = [&](std::int64_t first, std::int64_t last, double size, double q) {
        const double a = static_cast<double>(first) * size;
        const double b = static_cast<double>(last + 1) * size;
        const double g = q < a ? a - q : (q > b ? q - b : 0.0);
        return std::max(g - slack, 0.0);
    };

    struct Candidate {
        double lower_bound2;
        const std::vector<VoxelCoord> *voxels;
    };
    std::vector<Candidate> blocks;
    for (std::int64_t bi = block_lo.i; bi <= block_hi.i; ++bi) {
        const double gx = range_gap(bi, bi, block_size, query.x());
        for (std::int64_t bj = block_lo.j; bj <= block_hi.j; ++bj) {
            const double gy = range_gap(bj, bj, block_size, query.y());
            for (std::int64_t bk = block_lo.k; bk <= block_hi.k; ++bk) {
                const double gz = range_gap(bk, bk, block_size, query.z());
                const double lb2 = gx * gx + gy * gy + gz * gz;
                if (lb2 > (max_dist_ + slack) * (max_dist_ + slack)) continue;
                const auto it = map_->blocks_.find({bi, bj, bk});
                if (it != map_->blocks_.end()) blocks.push_back({lb2, &it->second});
            }
        }
    }
    std::sort(blocks.begin(), blocks.end(), [](const Candidate &a, const Candidate &b) {
        return a.lower_bound2 < b.lower_bound2;
    });

    double best_d2 = std::numeric_limits<double>::infinity();
    std::int64_t best_rank = std::numeric_limits<std::int64_t>::max();
    const Vector3d *best = nullptr;
    for (const auto &block : blocks) {
        if (block.lower_bound2 > best_d2) break;
        for (const VoxelCoord &c : *block.voxels) {
            if (c.i < lo.i || c.i > hi.i || c.j < lo.j || c.j > hi.j || c.k < lo.k ||
                c.k > hi.k) {
                continue;
            }
            const double gx = range_gap(c.i, c.i, v, query.x());
            const double gy = range_gap(c.j, c.j, v, query.y());
            const double gz = range_gap(c.k, c.k, v, query.z());
            if (gx * gx + gy * gy + gz * gz > best_d2) continue;
            const std::int64_t rank = ((c.i - lo.i) * side + (c.j - lo.j)) * side + (c.k - lo.k);
            for (const auto &p : *map_->find(c)) {
                const double d2 = (p - query).squaredNorm();
                if (d2 < best_d2 || (d2 == best_d2 && rank < best_rank)) {
                    best_d2 = d2;
                    best_rank = rank;
                    best = &p;
                }
            }
        }
    }

    if (best == nullptr) return std::nullopt;
    const double distance = std::sqrt(best_d2);
    if (distance > max_dist_) return std::nullopt;
    return Neighbor{*best, distance};
}

}  // namespace lidar_odom
