#pragma once

#include <memory>
#include <span>
#include <vector>

#include "rhull/cell_grid.hpp"
#include "rhull/region.hpp"
#include "rhull/triangulation.hpp"

namespace rhull {

// Piece of the boundary of an r-convex hull: a minor arc of radius `radius`
// from `a` to `b` whose generating open disc (centre `center`) contains no
// sample. The region lies to the left of a -> b, so the arc bulges into the
// region and runs clockwise about its centre. radius == inf is a straight edge.
// `from` / `to` are sample indices, or kNone where the arc was cut by a
// neighbouring disc.
struct BoundaryArc {
    std::size_t from = kNone;
    std::size_t to = kNone;
    Point a, b;
    Point center;
    double radius = kInf;

    bool straight() const { return !std::isfinite(radius); }
    double chord() const { return dist(a, b); }
    // Opening angle seen from the centre.
    double angle() const;
    double length() const;
    // Area between the chord and the arc.
    double segment_area() const;
    // Whether the ray from the centre through p crosses the arc.
    bool in_sector(Point p) const;
    double distance(Point p) const;
    BBox bounds() const;
    // Point at parameter s in [0, 1] from a to b.
    Point point_at(double s) const;
    // True when p lies in the open generating disc (with a relative margin).
    bool disc_contains(Point p) const;
};

// C_r(X_n): the complement of the union of all open discs of radius r that
// miss the sample, built from the Delaunay triangles with circumradius <= r.
// Each boundary edge of the kept triangles carries an empty disc of radius r;
// the region is the kept triangles minus those discs. Near sharp corners
// neighbouring discs overlap, so the true boundary is the part of each edge
// arc outside the other discs, which can pinch off corners (they become
// isolated points) or split a triangle. Samples with no kept triangle are
// isolated points. r = inf gives the convex hull.
class HullRegion final : public Region {
public:
    HullRegion(IndexPtr index, double r);

    double radius() const { return r_; }
    bool is_convex_hull() const { return !std::isfinite(r_); }
    const TriangulationIndex& index() const { return *index_; }
    const IndexPtr& index_ptr() const { return index_; }

    std::span<const std::size_t> triangles() const { return triangles_; }
    bool triangle_kept(std::size_t t) const { return kept_[t] != 0; }
    // Boundary pieces, i.e. edge arcs after cutting.
    std::span<const BoundaryArc> arcs() const { return arcs_; }
    // One uncut arc per boundary edge of the kept triangles.
    std::span<const BoundaryArc> edge_arcs() const { return raw_; }
    std::span<const std::size_t> isolated_points() const { return isolated_; }
    // Non-empty only for the convex hull of a collinear sample.
    bool is_segment() const { return segment_.first != kNone; }
    std::pair<std::size_t, std::size_t> segment() const { return segment_; }

    std::size_t component_count() const { return component_count_; }
    // Component label per sample, numbered in order of first appearance.
    // Components holding no sample (possible after pinching) come last.
    std::span<const std::size_t> labels() const { return labels_; }

    // Sample i lies on the boundary (isolated or an arc endpoint).
    bool sample_on_boundary(std::size_t i) const { return on_boundary_[i] != 0; }

    double boundary_length() const { return length_; }

    // Closed boundary loops as arc indices; region on the left. Outer loops
    // are counter-clockwise, holes clockwise.
    const std::vector<std::vector<std::size_t>>& loops() const { return loops_; }
    // Component of each loop and its signed area (positive for outer loops).
    std::span<const std::size_t> loop_components() const { return loop_component_; }
    std::span<const double> loop_areas() const { return loop_area_; }

    // Flattened loop: arc vertices with at most `chord_tol` sagitta error.
    std::vector<Point> flatten_loop(const std::vector<std::size_t>& loop, double chord_tol) const;

    bool contains(Point p) const override;
    double boundary_distance(Point p) const override;
    BBox bounds() const override { return index_->points().bounds(); }
    std::vector<Point> boundary_samples(double step) const override;
    double area() const override { return area_; }

private:
    void cut_arcs();
    void link_pieces();
    void build_components();
    void build_boundary_grid();
    std::size_t locate(Point p) const;
    std::size_t next_edge_arc(std::size_t k) const;

    IndexPtr index_;
    double r_;
    std::vector<char> kept_;
    std::vector<std::size_t> triangles_;
    std::vector<BoundaryArc> raw_;
    std::vector<std::size_t> raw_halfedge_;
    std::vector<std::size_t> raw_piece_begin_;
    std::vector<BoundaryArc> arcs_;
    std::vector<std::size_t> piece_raw_, start_cause_, end_cause_, next_piece_;
    std::vector<std::vector<std::size_t>> loops_;
    std::vector<std::size_t> loop_component_;
    std::vector<double> loop_area_;
    std::vector<std::size_t> isolated_;
    std::pair<std::size_t, std::size_t> segment_{kNone, kNone};
    std::vector<std::size_t> labels_;
    std::vector<char> on_boundary_;
    std::size_t component_count_ = 0;
    double area_ = 0;
    double length_ = 0;
    double scale_ = 1;
    CellGrid tri_grid_;
    CellGrid raw_grid_;       // edge arcs; their discs meet the kept triangles only inside these boxes
    CellGrid boundary_grid_;  // pieces, then isolated points, then the segment
};

using RegionPtr = std::shared_ptr<const HullRegion>;

HullRegion r_convex_hull(IndexPtr index, double r);
HullRegion convex_hull(IndexPtr index);

struct ComponentLabels {
    std::size_t count = 0;
    std::vector<std::size_t> labels;
};
ComponentLabels connected_components(const HullRegion& region);

// Positive inside, negative outside; throws EmptyRegion on a region with no
// boundary.
double distance_to_boundary(Point x, const HullRegion& region);

}  // namespace rhull
