#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "rhull/cell_grid.hpp"
#include "rhull/delaunay.hpp"
#include "rhull/point_set.hpp"

namespace rhull {

// Delaunay triangulation, its Voronoi dual and a nearest-neighbour structure
// over one PointSet.
//
// For a sample lying on a single line there are no triangles; neighbours are
// then the adjacent points along the line and Voronoi cells are the strips
// between consecutive bisectors.
class TriangulationIndex {
public:
    explicit TriangulationIndex(PointSet points);

    const PointSet& points() const { return points_; }
    const Point& point(std::size_t i) const { return points_[i]; }
    std::size_t size() const { return points_.size(); }

    bool collinear() const { return delaunay_.degenerate(); }
    const Delaunay& delaunay() const { return delaunay_; }

    std::size_t triangle_count() const { return delaunay_.triangle_count(); }
    std::array<std::size_t, 3> triangle(std::size_t t) const {
        const auto& tr = delaunay_.triangles;
        return {tr[3 * t], tr[3 * t + 1], tr[3 * t + 2]};
    }
    Point circumcenter(std::size_t t) const { return circumcenters_[t]; }
    double circumradius(std::size_t t) const { return circumradii_[t]; }

    // Delaunay neighbours of sample i, ascending.
    std::span<const std::size_t> neighbors(std::size_t i) const {
        return {nbr_.data() + nbr_offset_[i], nbr_offset_[i + 1] - nbr_offset_[i]};
    }
    std::span<const std::size_t> incident_triangles(std::size_t i) const {
        return {tri_of_.data() + tri_offset_[i], tri_offset_[i + 1] - tri_offset_[i]};
    }
    bool on_convex_hull(std::size_t i) const { return on_hull_[i] != 0; }
    std::span<const std::size_t> hull() const { return hull_; }

    // Nearest sample; equidistant samples resolve to the lowest index.
    std::size_t nearest(Point p) const;
    double nearest_distance(Point p) const { return dist(p, points_[nearest(p)]); }

    // Every sample whose distance to p is within rel_tol of the minimum, i.e.
    // the Voronoi cells containing p.
    std::vector<std::size_t> nearest_all(Point p, double rel_tol = 1e-12) const;

    // Exact containment test x ∈ Vor(X_i) against the Delaunay neighbours.
    bool in_voronoi_cell(Point x, std::size_t i) const;

    // Voronoi cell of sample i clipped to `clip`, counter-clockwise.
    std::vector<Point> voronoi_cell(std::size_t i, const BBox& clip) const;
    std::vector<Point> voronoi_cell(std::size_t i) const { return voronoi_cell(i, default_clip()); }

    // Sample bounding box inflated by twice the diameter.
    BBox default_clip() const;

    // Smallest nonzero nearest-neighbour distance in the sample.
    double min_nn_distance() const { return min_nn_; }

private:
    void build_line_structure();

    PointSet points_;
    Delaunay delaunay_;
    std::vector<Point> circumcenters_;
    std::vector<double> circumradii_;
    std::vector<std::size_t> nbr_offset_, nbr_;
    std::vector<std::size_t> tri_offset_, tri_of_;
    std::vector<char> on_hull_;
    std::vector<std::size_t> hull_;
    CellGrid grid_;
    double min_nn_ = 0;
};

using IndexPtr = std::shared_ptr<const TriangulationIndex>;

IndexPtr build_index(PointSet points);

// Sutherland-Hodgman clip of a convex polygon by {x : dot(x - origin, normal) <= 0}.
std::vector<Point> clip_half_plane(const std::vector<Point>& poly, Point origin, Point normal);

}  // namespace rhull
