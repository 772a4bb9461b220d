#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rhull/common.hpp"

namespace rhull {

// Immutable planar sample. Construction rejects empty input, non-finite
// coordinates and exact duplicates.
class PointSet {
public:
    explicit PointSet(std::vector<Point> points);

    std::size_t size() const { return points_.size(); }
    const Point& operator[](std::size_t i) const { return points_[i]; }
    std::span<const Point> points() const { return points_; }
    const BBox& bounds() const { return bounds_; }

    // Largest pairwise distance.
    double diameter() const { return diameter_; }

    // Coordinate-wise sample standard deviations averaged over the two axes;
    // 1 for a single point.
    double mean_coordinate_sd() const;

    // FNV-1a over the raw coordinate bytes, in sample order.
    std::uint64_t hash() const;

private:
    std::vector<Point> points_;
    BBox bounds_;
    double diameter_ = 0;
};

// Convex hull vertex indices in counter-clockwise order (Andrew's monotone
// chain). Collinear boundary points are dropped; a collinear sample yields its
// two extreme points.
std::vector<std::size_t> convex_hull_indices(std::span<const Point> points);

}  // namespace rhull
