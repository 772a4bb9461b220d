#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "rhull/common.hpp"

namespace rhull {

// Uniform bucket grid over axis-aligned boxes. Items are registered in every
// cell their box overlaps; queries visit cells in square rings around the
// query cell and stop once no unvisited cell can beat the current best.
class CellGrid {
public:
    CellGrid() = default;
    CellGrid(const BBox& box, std::size_t target_cells);

    void insert(std::size_t id, const BBox& box);

    std::span<const std::size_t> cell_items(Point p) const;

    // Calls fn(id) for every item in a cell overlapping `box`; an item may be
    // reported more than once.
    template <class Fn>
    void for_each_in(const BBox& box, Fn&& fn) const;

    // dist_fn(id) -> distance. Returns {id, distance}; ties resolved towards the
    // smaller id. Returns {kNone, inf} when the grid holds no item.
    template <class DistFn>
    std::pair<std::size_t, double> nearest(Point p, DistFn&& dist_fn) const;

    bool empty() const { return count_ == 0; }

private:
    std::size_t cell_x(double x) const;
    std::size_t cell_y(double y) const;
    double ring_lower_bound(Point p, std::size_t cx, std::size_t cy, std::size_t k) const;

    BBox box_;
    double step_ = 1;
    std::size_t nx_ = 0, ny_ = 0;
    std::size_t count_ = 0;
    std::vector<std::vector<std::size_t>> cells_;
};

inline CellGrid::CellGrid(const BBox& box, std::size_t target_cells) : box_(box) {
    double w = std::max(box.width(), 0.0), h = std::max(box.height(), 0.0);
    const double span = std::max({w, h, 1e-300});
    if (w <= 0) w = span * 1e-3;
    if (h <= 0) h = span * 1e-3;
    target_cells = std::max<std::size_t>(target_cells, 1);
    step_ = std::sqrt(w * h / static_cast<double>(target_cells));
    if (!(step_ > 0)) step_ = span;
    nx_ = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(w / step_)), 1, 4096);
    ny_ = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(h / step_)), 1, 4096);
    step_ = std::max(w / static_cast<double>(nx_), h / static_cast<double>(ny_));
    cells_.resize(nx_ * ny_);
}

inline std::size_t CellGrid::cell_x(double x) const {
    const double c = std::floor((x - box_.lo.x) / step_);
    if (!(c > 0)) return 0;
    return std::min(static_cast<std::size_t>(c), nx_ - 1);
}

inline std::size_t CellGrid::cell_y(double y) const {
    const double c = std::floor((y - box_.lo.y) / step_);
    if (!(c > 0)) return 0;
    return std::min(static_cast<std::size_t>(c), ny_ - 1);
}

inline void CellGrid::insert(std::size_t id, const BBox& b) {
    const std::size_t x0 = cell_x(b.lo.x), x1 = cell_x(b.hi.x);
    const std::size_t y0 = cell_y(b.lo.y), y1 = cell_y(b.hi.y);
    for (std::size_t y = y0; y <= y1; ++y)
        for (std::size_t x = x0; x <= x1; ++x) cells_[y * nx_ + x].push_back(id);
    ++count_;
}

inline std::span<const std::size_t> CellGrid::cell_items(Point p) const {
    if (cells_.empty()) return {};
    return cells_[cell_y(p.y) * nx_ + cell_x(p.x)];
}

template <class Fn>
void CellGrid::for_each_in(const BBox& b, Fn&& fn) const {
    if (cells_.empty() || b.empty()) return;
    const std::size_t x0 = cell_x(b.lo.x), x1 = cell_x(b.hi.x);
    const std::size_t y0 = cell_y(b.lo.y), y1 = cell_y(b.hi.y);
    for (std::size_t y = y0; y <= y1; ++y)
        for (std::size_t x = x0; x <= x1; ++x)
            for (std::size_t id : cells_[y * nx_ + x]) fn(id);
}

// Distance from p to the complement of the block of cells within Chebyshev
// radius k - 1 of (cx, cy); every cell of ring k lies in that complement.
inline double CellGrid::ring_lower_bound(Point p, std::size_t cx, std::size_t cy, std::size_t k) const {
    if (k == 0) return 0;
    const double m = static_cast<double>(k - 1);
    const double lox = box_.lo.x + (static_cast<double>(cx) - m) * step_;
    const double hix = box_.lo.x + (static_cast<double>(cx) + m + 1) * step_;
    const double loy = box_.lo.y + (static_cast<double>(cy) - m) * step_;
    const double hiy = box_.lo.y + (static_cast<double>(cy) + m + 1) * step_;
    if (p.x < lox || p.x > hix || p.y < loy || p.y > hiy) return 0;
    return std::min({p.x - lox, hix - p.x, p.y - loy, hiy - p.y});
}

template <class DistFn>
std::pair<std::size_t, double> CellGrid::nearest(Point p, DistFn&& dist_fn) const {
    std::pair<std::size_t, double> best{kNone, kInf};
    if (count_ == 0) return best;
    const std::size_t cx = cell_x(p.x), cy = cell_y(p.y);
    const std::size_t kmax = std::max(nx_, ny_);
    for (std::size_t k = 0; k <= kmax; ++k) {
        if (best.first != kNone && ring_lower_bound(p, cx, cy, k) > best.second) break;
        const long long x0 = static_cast<long long>(cx) - static_cast<long long>(k);
        const long long x1 = static_cast<long long>(cx) + static_cast<long long>(k);
        const long long y0 = static_cast<long long>(cy) - static_cast<long long>(k);
        const long long y1 = static_cast<long long>(cy) + static_cast<long long>(k);
        auto visit = [&](long long x, long long y) {
            if (x < 0 || y < 0 || x >= static_cast<long long>(nx_) || y >= static_cast<long long>(ny_)) return;
            for (std::size_t id : cells_[static_cast<std::size_t>(y) * nx_ + static_cast<std::size_t>(x)]) {
                const double d = dist_fn(id);
                if (d < best.second || (d == best.second && id < best.first)) best = {id, d};
            }
        };
        if (k == 0) {
            visit(x0, y0);
            continue;
        }
        const long long xa = std::max(x0, 0LL), xb = std::min(x1, static_cast<long long>(nx_) - 1);
        const long long ya = std::max(y0 + 1, 0LL), yb = std::min(y1 - 1, static_cast<long long>(ny_) - 1);
        for (long long x = xa; x <= xb; ++x) {
            visit(x, y0);
            visit(x, y1);
        }
        for (long long y = ya; y <= yb; ++y) {
            visit(x0, y);
            visit(x1, y);
        }
    }
    return best;
}

}  // namespace rhull
