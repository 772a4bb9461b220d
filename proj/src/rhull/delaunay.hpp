#pragma once

#include <span>
#include <vector>

#include "rhull/common.hpp"

namespace rhull {

// Sweep-hull Delaunay triangulation in half-edge form.
//
// Triangle t owns half-edges 3t, 3t+1, 3t+2; half-edge e runs from
// triangles[e] to triangles[next_halfedge(e)], triangles are counter-clockwise
// and halfedges[e] is the opposite half-edge or kNone on the convex hull.
// A sample with every point on one line produces no triangles.
class Delaunay {
public:
    explicit Delaunay(std::span<const Point> points);

    std::vector<std::size_t> triangles;
    std::vector<std::size_t> halfedges;
    std::vector<std::size_t> hull;  // counter-clockwise

    bool degenerate() const { return triangles.empty(); }
    std::size_t triangle_count() const { return triangles.size() / 3; }

    static std::size_t next_halfedge(std::size_t e) { return e % 3 == 2 ? e - 2 : e + 1; }
    static std::size_t prev_halfedge(std::size_t e) { return e % 3 == 0 ? e + 2 : e - 1; }

private:
    std::size_t legalize(std::size_t a);
    std::size_t add_triangle(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t a,
                             std::size_t b, std::size_t c);
    void link(std::size_t a, std::size_t b);
    std::size_t hash_key(Point p) const;

    std::span<const Point> pts_;
    std::vector<std::size_t> hull_prev_, hull_next_, hull_tri_, hull_hash_;
    std::vector<std::size_t> edge_stack_;
    std::size_t hull_start_ = 0;
    Point center_;
};

// Positive when d lies strictly inside the circumcircle of the
// counter-clockwise triangle (a, b, c).
double in_circle(Point a, Point b, Point c, Point d);

Point circumcenter(Point a, Point b, Point c);

}  // namespace rhull
