#include "rhull/delaunay.hpp"

#include <algorithm>
#include <numeric>

namespace rhull {

namespace {

double circumradius2(Point a, Point b, Point c) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double ex = c.x - a.x, ey = c.y - a.y;
    const double bl = dx * dx + dy * dy, cl = ex * ex + ey * ey;
    const double d = dx * ey - dy * ex;
    if (d == 0) return kInf;
    const double x = (ey * bl - dy * cl) * 0.5 / d;
    const double y = (dx * cl - ex * bl) * 0.5 / d;
    return x * x + y * y;
}

// Monotone in the angle of (dx, dy), range [0, 1).
double pseudo_angle(double dx, double dy) {
    const double p = dx / (std::fabs(dx) + std::fabs(dy));
    return (dy > 0 ? 3 - p : 1 + p) / 4;
}

}  // namespace

double in_circle(Point a, Point b, Point c, Point d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double ap = adx * adx + ady * ady;
    const double bp = bdx * bdx + bdy * bdy;
    const double cp = cdx * cdx + cdy * cdy;
    return adx * (bdy * cp - bp * cdy) - ady * (bdx * cp - bp * cdx) + ap * (bdx * cdy - bdy * cdx);
}

Point circumcenter(Point a, Point b, Point c) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double ex = c.x - a.x, ey = c.y - a.y;
    const double bl = dx * dx + dy * dy, cl = ex * ex + ey * ey;
    const double d = dx * ey - dy * ex;
    return {a.x + (ey * bl - dy * cl) * 0.5 / d, a.y + (dx * cl - ex * bl) * 0.5 / d};
}

Delaunay::Delaunay(std::span<const Point> points) : pts_(points) {
    const std::size_t n = points.size();
    if (n < 3) return;

    BBox box;
    for (const auto& p : points) box.add(p);
    const Point mid{(box.lo.x + box.hi.x) / 2, (box.lo.y + box.hi.y) / 2};

    // Seed triangle: point nearest the box centre, its nearest neighbour, and
    // the third point giving the smallest circumcircle.
    std::size_t i0 = 0, i1 = kNone, i2 = kNone;
    double best = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = dist2(mid, points[i]);
        if (d < best) {
            i0 = i;
            best = d;
        }
    }
    best = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == i0) continue;
        const double d = dist2(points[i0], points[i]);
        if (d < best && d > 0) {
            i1 = i;
            best = d;
        }
    }
    best = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == i0 || i == i1) continue;
        const double r = circumradius2(points[i0], points[i1], points[i]);
        if (r < best) {
            i2 = i;
            best = r;
        }
    }
    if (i2 == kNone) return;  // every point on one line

    if (orient(points[i0], points[i1], points[i2]) < 0) std::swap(i1, i2);
    center_ = circumcenter(points[i0], points[i1], points[i2]);

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = dist2(points[i], center_);
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return d2[a] < d2[b]; });

    const std::size_t hash_size = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    hull_prev_.assign(n, kNone);
    hull_next_.assign(n, kNone);
    hull_tri_.assign(n, kNone);
    hull_hash_.assign(hash_size, kNone);

    const std::size_t max_triangles = 2 * n - 5;
    triangles.reserve(max_triangles * 3);
    halfedges.reserve(max_triangles * 3);

    hull_start_ = i0;
    hull_next_[i0] = hull_prev_[i2] = i1;
    hull_next_[i1] = hull_prev_[i0] = i2;
    hull_next_[i2] = hull_prev_[i1] = i0;
    hull_tri_[i0] = 0;
    hull_tri_[i1] = 1;
    hull_tri_[i2] = 2;
    hull_hash_[hash_key(points[i0])] = i0;
    hull_hash_[hash_key(points[i1])] = i1;
    hull_hash_[hash_key(points[i2])] = i2;
    add_triangle(i0, i1, i2, kNone, kNone, kNone);

    auto visible = [&](std::size_t from, std::size_t to, Point p) {
        return orient(points[from], points[to], p) < 0;
    };

    std::vector<char> inserted(n, 0);
    inserted[i0] = inserted[i1] = inserted[i2] = 1;

    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = ids[k];
        if (inserted[i]) continue;
        const Point p = points[i];

        std::size_t start = kNone;
        const std::size_t key = hash_key(p);
        for (std::size_t j = 0; j < hash_size; ++j) {
            start = hull_hash_[(key + j) % hash_size];
            if (start != kNone && start != hull_next_[start]) break;
        }
        start = hull_prev_[start];
        std::size_t e = start;
        std::size_t q = hull_next_[e];
        while (!visible(e, q, p)) {
            e = q;
            if (e == start) {
                e = kNone;
                break;
            }
            q = hull_next_[e];
        }
        if (e == kNone) continue;  // numerically inside the hull; caught by the caller

        std::size_t t = add_triangle(e, i, hull_next_[e], kNone, kNone, hull_tri_[e]);
        hull_tri_[i] = legalize(t + 2);
        hull_tri_[e] = t;
        inserted[i] = 1;

        std::size_t nxt = hull_next_[e];
        q = hull_next_[nxt];
        while (visible(nxt, q, p)) {
            t = add_triangle(nxt, i, q, hull_tri_[i], kNone, hull_tri_[nxt]);
            hull_tri_[i] = legalize(t + 2);
            hull_next_[nxt] = nxt;
            nxt = q;
            q = hull_next_[nxt];
        }

        if (e == start) {
            q = hull_prev_[e];
            while (visible(q, e, p)) {
                t = add_triangle(q, i, e, kNone, hull_tri_[e], hull_tri_[q]);
                legalize(t + 2);
                hull_tri_[q] = t;
                hull_next_[e] = e;
                e = q;
                q = hull_prev_[e];
            }
        }

        hull_start_ = hull_prev_[i] = e;
        hull_next_[e] = hull_prev_[nxt] = i;
        hull_next_[i] = nxt;
        hull_hash_[hash_key(p)] = i;
        hull_hash_[hash_key(points[e])] = e;
    }

    std::size_t e = hull_start_;
    do {
        hull.push_back(e);
        e = hull_next_[e];
    } while (e != hull_start_);

    hull_prev_.clear();
    hull_next_.clear();
    hull_tri_.clear();
    hull_hash_.clear();
}

std::size_t Delaunay::hash_key(Point p) const {
    const double a = pseudo_angle(p.x - center_.x, p.y - center_.y);
    const auto size = hull_hash_.size();
    return static_cast<std::size_t>(std::floor(a * static_cast<double>(size))) % size;
}

void Delaunay::link(std::size_t a, std::size_t b) {
    halfedges[a] = b;
    if (b != kNone) halfedges[b] = a;
}

std::size_t Delaunay::add_triangle(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t a,
                                   std::size_t b, std::size_t c) {
    const std::size_t t = triangles.size();
    triangles.push_back(i0);
    triangles.push_back(i1);
    triangles.push_back(i2);
    halfedges.push_back(kNone);
    halfedges.push_back(kNone);
    halfedges.push_back(kNone);
    link(t, a);
    link(t + 1, b);
    link(t + 2, c);
    return t;
}

std::size_t Delaunay::legalize(std::size_t a) {
    std::size_t ar = 0;
    edge_stack_.clear();
    while (true) {
        const std::size_t b = halfedges[a];
        const std::size_t a0 = a - a % 3;
        ar = a0 + (a + 2) % 3;

        if (b == kNone) {
            if (edge_stack_.empty()) break;
            a = edge_stack_.back();
            edge_stack_.pop_back();
            continue;
        }

        const std::size_t b0 = b - b % 3;
        const std::size_t al = a0 + (a + 1) % 3;
        const std::size_t bl = b0 + (b + 2) % 3;

        const std::size_t p0 = triangles[ar];
        const std::size_t pr = triangles[a];
        const std::size_t pl = triangles[al];
        const std::size_t p1 = triangles[bl];

        if (in_circle(pts_[pr], pts_[pl], pts_[p0], pts_[p1]) > 0) {
            triangles[a] = p1;
            triangles[b] = p0;

            const std::size_t hbl = halfedges[bl];
            if (hbl == kNone) {
                std::size_t e = hull_start_;
                do {
                    if (hull_tri_[e] == bl) {
                        hull_tri_[e] = a;
                        break;
                    }
                    e = hull_prev_[e];
                } while (e != hull_start_);
            }
            link(a, hbl);
            link(b, halfedges[ar]);
            link(ar, bl);
            edge_stack_.push_back(b0 + (b + 1) % 3);
        } else {
            if (edge_stack_.empty()) break;
            a = edge_stack_.back();
            edge_stack_.pop_back();
        }
    }
    return ar;
}

}  // namespace rhull
