#pragma once

#include <vector>

#include "rhull/common.hpp"
#include "rhull/triangulation.hpp"

namespace rhull {

// Closed bounded planar set seen through the queries the metrics and the
// spacing oracle need.
class Region {
public:
    virtual ~Region() = default;

    virtual bool contains(Point p) const = 0;
    // Unsigned distance from p to the boundary.
    virtual double boundary_distance(Point p) const = 0;
    virtual BBox bounds() const = 0;
    // Points on the boundary with consecutive spacing at most `step`.
    virtual std::vector<Point> boundary_samples(double step) const = 0;
    virtual double area() const = 0;

    // d(p, region): zero inside.
    double distance(Point p) const { return contains(p) ? 0.0 : boundary_distance(p); }
    // Positive inside, negative outside.
    double signed_distance(Point p) const {
        const double d = boundary_distance(p);
        return contains(p) ? d : -d;
    }
};

// A finite sample viewed as a (measure-zero) set.
class PointCloudRegion final : public Region {
public:
    explicit PointCloudRegion(IndexPtr index) : index_(std::move(index)) {}

    bool contains(Point p) const override { return index_->nearest_distance(p) == 0; }
    double boundary_distance(Point p) const override { return index_->nearest_distance(p); }
    BBox bounds() const override { return index_->points().bounds(); }
    std::vector<Point> boundary_samples(double) const override {
        auto pts = index_->points().points();
        return {pts.begin(), pts.end()};
    }
    double area() const override { return 0; }

private:
    IndexPtr index_;
};

}  // namespace rhull
