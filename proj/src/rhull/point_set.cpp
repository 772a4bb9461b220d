#include "rhull/point_set.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

namespace rhull {

PointSet::PointSet(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.empty()) throw Error(ErrorCode::empty_input, "point set is empty");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const Point& p = points_[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw Error(ErrorCode::invalid_argument,
                        "non-finite coordinate at index " + std::to_string(i));
        bounds_.add(p);
    }

    std::vector<std::size_t> order(points_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Point &p = points_[a], &q = points_[b];
        return p.x < q.x || (p.x == q.x && (p.y < q.y || (p.y == q.y && a < b)));
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (points_[order[k]] == points_[order[k - 1]])
            throw Error(ErrorCode::duplicate_points,
                        "duplicate points at indices " + std::to_string(order[k - 1]) + " and " +
                            std::to_string(order[k]));
    }

    const auto hull = convex_hull_indices(points_);
    for (std::size_t a = 0; a < hull.size(); ++a)
        for (std::size_t b = a + 1; b < hull.size(); ++b)
            diameter_ = std::max(diameter_, dist(points_[hull[a]], points_[hull[b]]));
}

double PointSet::mean_coordinate_sd() const {
    const std::size_t n = points_.size();
    if (n < 2) return 1.0;
    double mx = 0, my = 0;
    for (const auto& p : points_) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sx = 0, sy = 0;
    for (const auto& p : points_) {
        sx += (p.x - mx) * (p.x - mx);
        sy += (p.y - my) * (p.y - my);
    }
    const double denom = static_cast<double>(n - 1);
    return 0.5 * (std::sqrt(sx / denom) + std::sqrt(sy / denom));
}

std::uint64_t PointSet::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (const auto& p : points_) {
        unsigned char bytes[2 * sizeof(double)];
        std::memcpy(bytes, &p.x, sizeof(double));
        std::memcpy(bytes + sizeof(double), &p.y, sizeof(double));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 1099511628211ull;
        }
    }
    return h;
}

std::vector<std::size_t> convex_hull_indices(std::span<const Point> points) {
    const std::size_t n = points.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return points[a].x < points[b].x || (points[a].x == points[b].x && points[a].y < points[b].y);
    });
    if (n < 3) return idx;

    std::vector<std::size_t> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && orient(points[hull[k - 2]], points[hull[k - 1]], points[idx[i]]) <= 0) --k;
        hull[k++] = idx[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && orient(points[hull[k - 2]], points[hull[k - 1]], points[idx[i]]) <= 0) --k;
        hull[k++] = idx[i];
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace rhull
