#pragma once

// Brute-force reference computations used by the unit and acceptance suites.
// Nothing here calls into the hull, density or spacing code paths it checks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "rhull/common.hpp"

namespace oracle {

using rhull::Point;

inline std::vector<Point> uniform_square(std::size_t n, std::uint64_t seed, double side = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, side);
    std::vector<Point> pts(n);
    for (auto& p : pts) p = {u(rng), u(rng)};
    return pts;
}

inline std::vector<Point> uniform_disc(std::size_t n, std::uint64_t seed, double radius = 1.0,
                                       Point center = {0, 0}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-radius, radius);
    std::vector<Point> pts;
    while (pts.size() < n) {
        const Point p{u(rng), u(rng)};
        if (p.x * p.x + p.y * p.y <= radius * radius) pts.push_back({p.x + center.x, p.y + center.y});
    }
    return pts;
}

inline std::size_t brute_nearest(const std::vector<Point>& pts, Point q) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = std::hypot(pts[i].x - q.x, pts[i].y - q.y);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

// 1-D squared Euclidean distance transform (Felzenszwalb & Huttenlocher).
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d) {
    const std::size_t n = f.size();
    std::vector<std::size_t> v(n);
    std::vector<double> z(n + 1);
    std::size_t k = 0;
    const double inf = std::numeric_limits<double>::infinity();
    std::size_t first = n;
    for (std::size_t q = 0; q < n; ++q)
        if (f[q] < inf) {
            first = q;
            break;
        }
    d.assign(n, inf);
    if (first == n) return;
    v[0] = first;
    z[0] = -inf;
    z[1] = inf;
    for (std::size_t q = first + 1; q < n; ++q) {
        if (!(f[q] < inf)) continue;
        double s;
        while (true) {
            const double vq = static_cast<double>(v[k]);
            s = ((f[q] + double(q) * double(q)) - (f[v[k]] + vq * vq)) / (2.0 * double(q) - 2.0 * vq);
            if (s <= z[k] && k > 0) {
                --k;
                continue;
            }
            break;
        }
        if (s <= z[k]) {  // k == 0
            v[0] = q;
            z[0] = -inf;
            z[1] = inf;
            continue;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    k = 0;
    for (std::size_t q = 0; q < n; ++q) {
        while (z[k + 1] < double(q)) ++k;
        const double dq = double(q) - double(v[k]);
        d[q] = dq * dq + f[v[k]];
    }
}

// Rasterised complement-of-empty-balls hull of `pts` on the square
// [lo, lo + side]^2 with `res` x `res` cells. Ball centres range over a
// lattice with the same spacing extended by r beyond the square; a centre is
// admissible when no sample lies strictly within r. A cell is outside the
// hull when its centre lies strictly within r of an admissible centre.
struct Raster {
    std::size_t res = 0;
    double lo = 0, step = 0;
    std::vector<char> inside;  // row-major, y-major
    Point center(std::size_t ix, std::size_t iy) const {
        return {lo + (double(ix) + 0.5) * step, lo + (double(iy) + 0.5) * step};
    }
    bool at(std::size_t ix, std::size_t iy) const { return inside[iy * res + ix] != 0; }
};

inline Raster rasterized_hull(const std::vector<Point>& pts, double r, double lo, double side, std::size_t res) {
    Raster out;
    out.res = res;
    out.lo = lo;
    out.step = side / double(res);
    const double h = out.step;
    const auto pad = static_cast<std::size_t>(std::ceil(r / h)) + 2;
    const std::size_t m = res + 2 * pad;
    const double origin = lo + 0.5 * h - double(pad) * h;  // lattice coordinate of index 0

    std::vector<char> admissible(m * m, 1);
    const auto rad_cells = static_cast<long long>(std::ceil(r / h)) + 1;
    for (const Point& p : pts) {
        const long long cx = std::llround((p.x - origin) / h);
        const long long cy = std::llround((p.y - origin) / h);
        for (long long iy = cy - rad_cells; iy <= cy + rad_cells; ++iy) {
            if (iy < 0 || iy >= (long long)m) continue;
            for (long long ix = cx - rad_cells; ix <= cx + rad_cells; ++ix) {
                if (ix < 0 || ix >= (long long)m) continue;
                const double gx = origin + double(ix) * h, gy = origin + double(iy) * h;
                if (std::hypot(gx - p.x, gy - p.y) < r) admissible[std::size_t(iy) * m + std::size_t(ix)] = 0;
            }
        }
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> g(m * m), col(m), colout;
    for (std::size_t ix = 0; ix < m; ++ix) {
        for (std::size_t iy = 0; iy < m; ++iy) col[iy] = admissible[iy * m + ix] ? 0.0 : inf;
        edt_1d(col, colout);
        for (std::size_t iy = 0; iy < m; ++iy) g[iy * m + ix] = colout[iy];
    }
    std::vector<double> row(m), rowout;
    out.inside.assign(res * res, 1);
    const double r_cells2 = (r / h) * (r / h);
    for (std::size_t iy = 0; iy < m; ++iy) {
        for (std::size_t ix = 0; ix < m; ++ix) row[ix] = g[iy * m + ix];
        edt_1d(row, rowout);
        if (iy < pad || iy >= pad + res) continue;
        for (std::size_t ix = pad; ix < pad + res; ++ix)
            if (rowout[ix] < r_cells2) out.inside[(iy - pad) * res + (ix - pad)] = 0;
    }
    return out;
}

// Cells whose raster value differs from a 4-neighbour.
inline std::size_t raster_boundary_cells(const Raster& r) {
    std::size_t count = 0;
    for (std::size_t iy = 0; iy < r.res; ++iy)
        for (std::size_t ix = 0; ix < r.res; ++ix) {
            const bool v = r.at(ix, iy);
            bool edge = false;
            if (ix > 0 && r.at(ix - 1, iy) != v) edge = true;
            if (ix + 1 < r.res && r.at(ix + 1, iy) != v) edge = true;
            if (iy > 0 && r.at(ix, iy - 1) != v) edge = true;
            if (iy + 1 < r.res && r.at(ix, iy + 1) != v) edge = true;
            count += edge;
        }
    return count;
}

}  // namespace oracle
