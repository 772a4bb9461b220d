#include "rhull/triangulation.hpp"

#include <algorithm>
#include <numeric>

namespace rhull {

namespace {

void build_csr(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
               std::vector<std::size_t>& offset, std::vector<std::size_t>& items) {
    offset.assign(n + 1, 0);
    for (const auto& [a, b] : pairs) ++offset[a + 1];
    std::partial_sum(offset.begin(), offset.end(), offset.begin());
    items.assign(pairs.size(), 0);
    std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
    for (const auto& [a, b] : pairs) items[fill[a]++] = b;
    for (std::size_t i = 0; i < n; ++i) {
        auto first = items.begin() + static_cast<std::ptrdiff_t>(offset[i]);
        auto last = items.begin() + static_cast<std::ptrdiff_t>(offset[i + 1]);
        std::sort(first, last);
    }
}

}  // namespace

TriangulationIndex::TriangulationIndex(PointSet points)
    : points_(std::move(points)), delaunay_(points_.points()) {
    const std::size_t n = points_.size();

    grid_ = CellGrid(points_.bounds(), std::max<std::size_t>(1, n / 2));
    for (std::size_t i = 0; i < n; ++i) grid_.insert(i, BBox{points_[i], points_[i]});

    if (delaunay_.degenerate()) {
        build_line_structure();
        return;
    }

    const std::size_t nt = delaunay_.triangle_count();
    circumcenters_.resize(nt);
    circumradii_.resize(nt);
    std::vector<std::pair<std::size_t, std::size_t>> edges, incid;
    edges.reserve(6 * n);
    incid.reserve(3 * nt);
    for (std::size_t t = 0; t < nt; ++t) {
        const auto [a, b, c] = triangle(t);
        circumcenters_[t] = rhull::circumcenter(points_[a], points_[b], points_[c]);
        circumradii_[t] = dist(circumcenters_[t], points_[a]);
        incid.emplace_back(a, t);
        incid.emplace_back(b, t);
        incid.emplace_back(c, t);
    }
    for (std::size_t e = 0; e < delaunay_.halfedges.size(); ++e) {
        const std::size_t twin = delaunay_.halfedges[e];
        if (twin != kNone && twin < e) continue;
        const std::size_t a = delaunay_.triangles[e];
        const std::size_t b = delaunay_.triangles[Delaunay::next_halfedge(e)];
        edges.emplace_back(a, b);
        edges.emplace_back(b, a);
    }
    build_csr(n, edges, nbr_offset_, nbr_);
    build_csr(n, incid, tri_offset_, tri_of_);

    for (std::size_t i = 0; i < n; ++i) {
        if (tri_offset_[i + 1] == tri_offset_[i])
            throw Error(ErrorCode::invalid_argument,
                        "triangulation could not place point " + std::to_string(i) +
                            " (near-degenerate input)");
    }

    on_hull_.assign(n, 0);
    hull_ = delaunay_.hull;
    for (std::size_t h : hull_) on_hull_[h] = 1;

    min_nn_ = kInf;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : neighbors(i)) min_nn_ = std::min(min_nn_, dist(points_[i], points_[j]));
}

void TriangulationIndex::build_line_structure() {
    const std::size_t n = points_.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return points_[a].x < points_[b].x || (points_[a].x == points_[b].x && points_[a].y < points_[b].y);
    });
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t k = 1; k < n; ++k) {
        edges.emplace_back(order[k - 1], order[k]);
        edges.emplace_back(order[k], order[k - 1]);
    }
    build_csr(n, edges, nbr_offset_, nbr_);
    tri_offset_.assign(n + 1, 0);
    on_hull_.assign(n, 1);
    hull_ = {order.front()};
    if (n > 1) hull_.push_back(order.back());
    min_nn_ = n > 1 ? kInf : 0;
    for (std::size_t k = 1; k < n; ++k) min_nn_ = std::min(min_nn_, dist(points_[order[k]], points_[order[k - 1]]));
}

std::size_t TriangulationIndex::nearest(Point p) const {
    return grid_.nearest(p, [&](std::size_t id) { return dist(p, points_[id]); }).first;
}

std::vector<std::size_t> TriangulationIndex::nearest_all(Point p, double rel_tol) const {
    const std::size_t first = nearest(p);
    const double limit = dist(p, points_[first]) * (1 + rel_tol);
    std::vector<std::size_t> out{first};
    std::vector<std::size_t> stack{first};
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w : neighbors(v)) {
            if (std::find(out.begin(), out.end(), w) != out.end()) continue;
            if (dist(p, points_[w]) <= limit) {
                out.push_back(w);
                stack.push_back(w);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool TriangulationIndex::in_voronoi_cell(Point x, std::size_t i) const {
    const double di = dist2(x, points_[i]);
    for (std::size_t j : neighbors(i))
        if (dist2(x, points_[j]) < di) return false;
    return true;
}

BBox TriangulationIndex::default_clip() const {
    const double d = points_.diameter();
    return points_.bounds().inflated(d > 0 ? 2 * d : 1.0);
}

std::vector<Point> clip_half_plane(const std::vector<Point>& poly, Point origin, Point normal) {
    std::vector<Point> out;
    if (poly.empty()) return out;
    out.reserve(poly.size() + 1);
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const Point a = poly[k];
        const Point b = poly[(k + 1) % poly.size()];
        const double sa = dot(a - origin, normal);
        const double sb = dot(b - origin, normal);
        if (sa <= 0) out.push_back(a);
        if ((sa < 0 && sb > 0) || (sa > 0 && sb < 0)) {
            const double t = sa / (sa - sb);
            out.push_back(a + t * (b - a));
        }
    }
    return out;
}

std::vector<Point> TriangulationIndex::voronoi_cell(std::size_t i, const BBox& clip) const {
    std::vector<Point> poly{clip.lo, {clip.hi.x, clip.lo.y}, clip.hi, {clip.lo.x, clip.hi.y}};
    const Point xi = points_[i];
    for (std::size_t j : neighbors(i)) {
        const Point xj = points_[j];
        poly = clip_half_plane(poly, 0.5 * (xi + xj), xj - xi);
    }
    return poly;
}

IndexPtr build_index(PointSet points) {
    return std::make_shared<const TriangulationIndex>(std::move(points));
}

}  // namespace rhull
