#include "rhull/metrics.hpp"

#include <algorithm>
#include <queue>

#include "rhull/parallel.hpp"
#include "rhull/random.hpp"

namespace rhull {

namespace {

BBox joint_bounds(const Region& a, const Region& c) {
    BBox box = a.bounds();
    box.add(c.bounds());
    return box;
}

double resolve_step(const Region& a, const Region& c, double step) {
    if (step > 0) return step;
    if (step < 0 || std::isnan(step)) throw Error(ErrorCode::invalid_argument, "metric step must be positive");
    return default_metric_step(a, c);
}

// Upper bound of d(., C) over the disc of radius rho around p.
double cell_upper_bound(const Region& c, Point p, double rho) {
    const double bd = c.boundary_distance(p);
    if (c.contains(p)) return std::max(0.0, rho - bd);
    return bd + rho;
}

struct Cell {
    double upper;
    Point center;
    double half;
    bool operator<(const Cell& o) const {
        if (upper != o.upper) return upper < o.upper;
        if (center.x != o.center.x) return center.x > o.center.x;
        return center.y > o.center.y;
    }
};

}  // namespace

double default_metric_step(const Region& a, const Region& c) {
    const double diag = joint_bounds(a, c).diagonal();
    return diag > 0 ? diag / 2048 : 1.0 / 2048;
}

DistanceEstimate directed_hausdorff(const Region& a, const Region& c, double step) {
    step = resolve_step(a, c, step);
    double lower = 0;
    for (Point s : a.boundary_samples(step)) lower = std::max(lower, c.distance(s));
    if (a.area() <= 0) return {lower, step / 2};

    const BBox box = a.bounds();
    const double side = std::max(box.width(), box.height());
    const double tol = step / 2;
    std::priority_queue<Cell> queue;
    double unresolved = 0;

    auto push = [&](Point center, double half) {
        const double rho = half * std::sqrt(2.0);
        if (a.distance(center) > rho) return;
        if (a.contains(center)) lower = std::max(lower, c.distance(center));
        const double upper = cell_upper_bound(c, center, rho);
        if (upper <= lower) return;
        if (rho <= tol) {
            unresolved = std::max(unresolved, upper);
            return;
        }
        queue.push({upper, center, half});
    };

    const double half0 = side / 2 + step;
    push({0.5 * (box.lo.x + box.hi.x), 0.5 * (box.lo.y + box.hi.y)}, half0);
    while (!queue.empty()) {
        const Cell cell = queue.top();
        queue.pop();
        if (cell.upper <= lower) break;
        const double h = cell.half / 2;
        push({cell.center.x - h, cell.center.y - h}, h);
        push({cell.center.x + h, cell.center.y - h}, h);
        push({cell.center.x - h, cell.center.y + h}, h);
        push({cell.center.x + h, cell.center.y + h}, h);
    }
    return {lower, std::max(tol, unresolved - lower)};
}

DistanceEstimate hausdorff(const Region& a, const Region& c, double step) {
    step = resolve_step(a, c, step);
    const DistanceEstimate ac = directed_hausdorff(a, c, step);
    const DistanceEstimate ca = directed_hausdorff(c, a, step);
    return {std::max(ac.value, ca.value), std::max(ac.error_bound, ca.error_bound)};
}

DistanceEstimate boundary_hausdorff(const Region& a, const Region& c, double step) {
    step = resolve_step(a, c, step);
    double value = 0;
    for (Point s : a.boundary_samples(step)) value = std::max(value, c.boundary_distance(s));
    for (Point s : c.boundary_samples(step)) value = std::max(value, a.boundary_distance(s));
    return {value, step / 2};
}

MeasureEstimate distance_in_measure(const Region& a, const Region& c, std::size_t samples, std::uint64_t seed) {
    if (samples == 0) throw Error(ErrorCode::invalid_argument, "distance in measure needs at least one sample");
    MeasureEstimate out;
    out.samples = samples;
    out.seed = seed;
    const BBox box = joint_bounds(a, c);
    const double box_area = box.area();
    if (!(box_area > 0)) return out;

    constexpr std::size_t kChunk = 8192;
    const std::size_t chunks = (samples + kChunk - 1) / kChunk;
    std::vector<std::size_t> hits(chunks, 0);
    parallel_for(chunks, [&](std::size_t k) {
        Rng rng(derive_seed(seed, k));
        const std::size_t count = std::min(kChunk, samples - k * kChunk);
        std::size_t h = 0;
        for (std::size_t j = 0; j < count; ++j) {
            const Point p{rng.uniform(box.lo.x, box.hi.x), rng.uniform(box.lo.y, box.hi.y)};
            h += a.contains(p) != c.contains(p);
        }
        hits[k] = h;
    });
    std::size_t total = 0;
    for (std::size_t h : hits) total += h;
    const double p = static_cast<double>(total) / static_cast<double>(samples);
    out.value = p * box_area;
    out.standard_error = std::sqrt(p * (1 - p) / static_cast<double>(samples)) * box_area;
    return out;
}

}  // namespace rhull
