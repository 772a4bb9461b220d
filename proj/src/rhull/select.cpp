#include "rhull/select.hpp"

#include <algorithm>
#include <numeric>

namespace rhull {

namespace {

TestOptions tester_options(const SelectionConfig& c) {
    TestOptions opt;
    opt.h0 = c.h0;
    opt.bandwidth = c.bandwidth;
    opt.angular_samples = c.angular_samples;
    return opt;
}

TraceStep run_test(const RConvexityTester& tester, double r) {
    const TestResult res = tester.test(r);
    TraceStep step;
    step.r = r;
    step.reject = res.reject;
    step.components = res.components;
    step.witness = res.witness;
    return step;
}

}  // namespace

void SelectionConfig::validate() const {
    if (!(alpha > 0 && alpha < 1)) throw Error(ErrorCode::alpha_out_of_range, "alpha must lie in (0, 1)");
    if (iterations < 1) throw Error(ErrorCode::invalid_argument, "iterations must be at least 1");
    if (max_components < 1) throw Error(ErrorCode::invalid_argument, "max components must be at least 1");
    if (!(nu > 0 && nu <= 1)) throw Error(ErrorCode::invalid_argument, "nu must lie in (0, 1]");
    if (r_min < 0 || r_max < 0 || !std::isfinite(r_min) || !std::isfinite(r_max))
        throw Error(ErrorCode::invalid_endpoints, "endpoints must be finite and positive");
    if (r_min > 0 && r_max > 0 && r_min >= r_max)
        throw Error(ErrorCode::invalid_endpoints, "r_min must be smaller than r_max");
    if (!(escalation_limit >= 1)) throw Error(ErrorCode::invalid_argument, "escalation limit must be at least 1");
    if (!(h0 > 0) || bandwidth < 0) throw Error(ErrorCode::nonpositive_bandwidth, "bandwidth settings must be positive");
}

const char* fallback_name(Fallback f) {
    switch (f) {
        case Fallback::none: return "none";
        case Fallback::component_cap: return "component-cap";
        case Fallback::convex_hull: return "convex-hull";
    }
    return "none";
}

namespace {

// Smallest circumradius at which the kept triangles form at most
// `max_components` groups (counting uncovered samples). Cutting only splits
// components, so this bounds the true threshold from below.
double triangle_threshold(const TriangulationIndex& index, std::size_t max_components) {
    const std::size_t n = index.size();
    std::vector<std::size_t> order(index.triangle_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return index.circumradius(a) < index.circumradius(b); });
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t count = n;
    for (std::size_t t : order) {
        const auto tri = index.triangle(t);
        for (int k = 0; k < 2; ++k) {
            const std::size_t a = find(tri[k]), b = find(tri[k + 1]);
            if (a != b) {
                parent[std::max(a, b)] = std::min(a, b);
                --count;
            }
        }
        if (count <= max_components) return index.circumradius(t);
    }
    return kInf;
}

}  // namespace

double component_threshold(const IndexPtr& index, std::size_t max_components) {
    const std::size_t n = index->size();
    if (n <= max_components) return 0;
    if (index->collinear()) return kInf;
    auto count = [&](double r) { return HullRegion(index, r).component_count(); };
    double lo = triangle_threshold(*index, max_components);
    if (!std::isfinite(lo)) return kInf;
    if (count(lo) <= max_components) return lo;
    const double limit = 1024 * index->points().diameter();
    double hi = 2 * lo;
    while (count(hi) > max_components) {
        if (hi >= limit) return kInf;
        lo = hi;
        hi = std::min(2 * hi, limit);
    }
    for (int it = 0; it < 60 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (count(mid) <= max_components ? hi : lo) = mid;
    }
    return hi;
}

Endpoints validate_endpoints(const RConvexityTester& tester, const SelectionConfig& config) {
    config.validate();
    const TriangulationIndex& index = tester.index();
    Endpoints out;
    const double diameter = index.points().diameter();
    const double r_min = config.r_min > 0 ? config.r_min : 0.5 * index.min_nn_distance();
    double r_max = config.r_max > 0 ? config.r_max : diameter;
    out.r_components = component_threshold(tester.index_ptr(), config.max_components);
    if (!std::isfinite(out.r_components)) {
        out.directive = Fallback::convex_hull;
        return out;
    }

    double lo = std::max(r_min, out.r_components);
    auto lower = run_test(tester, lo);
    out.checks.push_back(lower);
    if (lower.reject && lo > out.r_components && out.r_components > 0) {
        lo = out.r_components;
        lower = run_test(tester, lo);
        out.checks.push_back(lower);
    }
    if (lower.reject) {
        out.directive = Fallback::component_cap;
        return out;
    }

    // The upper endpoint must reject and lie above the lower one.
    if (r_max <= lo) r_max = 2 * lo;
    const double limit = config.escalation_limit * std::max(diameter, lo);
    while (true) {
        const auto upper = run_test(tester, r_max);
        out.checks.push_back(upper);
        if (upper.reject) break;
        if (r_max >= limit) {
            out.directive = Fallback::convex_hull;
            return out;
        }
        r_max = std::min(2 * r_max, limit);
    }
    out.r_min = lo;
    out.r_max = r_max;

    // Move both ends up onto multiples of q = 2^I u, with u the spacing of
    // doubles just below 4 * 2^e >= 2 r_max. Every bisection midpoint is then
    // a multiple of u, so sums, halvings and differences are exact and the
    // final width is exactly (r_max - r_min) / 2^I.
    if (config.iterations <= 40) {
        const int e = std::ilogb(r_max);
        const double q = std::ldexp(1.0, e + 2 - 52 + static_cast<int>(config.iterations));
        const double lo_s = std::ceil(lo / q) * q;
        const double hi_s = lo_s + std::max(1.0, std::ceil((r_max - lo_s) / q)) * q;
        if (lo_s != lo || hi_s != r_max) {
            const auto a = run_test(tester, lo_s);
            const auto b = run_test(tester, hi_s);
            out.checks.push_back(a);
            out.checks.push_back(b);
            if (!a.reject && b.reject) {
                out.r_min = lo_s;
                out.r_max = hi_s;
            }
        }
    }
    return out;
}

Endpoints validate_endpoints(IndexPtr index, const SelectionConfig& config) {
    config.validate();
    const RConvexityTester tester(std::move(index), config.alpha, tester_options(config));
    return validate_endpoints(tester, config);
}

SelectionResult select_r0(const RConvexityTester& tester, const SelectionConfig& config) {
    SelectionResult res;
    res.c_crit = tester.c_crit();
    res.bandwidth = tester.bandwidth();
    res.m = tester.m();
    res.extreme_count = tester.extremes().size();
    res.endpoints = validate_endpoints(tester, config);
    res.fallback = res.endpoints.directive;
    if (res.fallback == Fallback::convex_hull) {
        res.r_hat = kInf;
        res.final_low = res.final_high = kInf;
        return res;
    }
    if (res.fallback == Fallback::component_cap) {
        res.r_hat = res.endpoints.r_components > 0 ? res.endpoints.r_components : res.endpoints.checks.front().r;
        res.final_low = res.final_high = res.r_hat;
        return res;
    }

    double lo = res.endpoints.r_min, hi = res.endpoints.r_max;
    for (std::size_t it = 0; it < config.iterations; ++it) {
        const double r = 0.5 * (lo + hi);
        TraceStep step = run_test(tester, r);
        (step.reject ? hi : lo) = r;
        step.low = lo;
        step.high = hi;
        res.trace.push_back(std::move(step));
    }
    res.r_hat = lo;
    res.final_low = lo;
    res.final_high = hi;
    return res;
}

SelectionResult select_r0(IndexPtr index, const SelectionConfig& config) {
    config.validate();
    const RConvexityTester tester(std::move(index), config.alpha, tester_options(config));
    return select_r0(tester, config);
}

SupportEstimate estimate_support(IndexPtr index, const SelectionConfig& config) {
    config.validate();
    SupportEstimate est;
    est.config = config;
    est.sample_hash = index->points().hash();
    if (index->size() < 3) {
        // Too small for the test; the convex hull is the only defensible estimate.
        est.selection.r_hat = kInf;
        est.selection.fallback = Fallback::convex_hull;
        est.selection.final_low = est.selection.final_high = kInf;
        est.selection.endpoints.directive = Fallback::convex_hull;
    } else {
        est.selection = select_r0(index, config);
    }
    est.radius = config.nu * est.selection.r_hat;
    est.region = std::make_shared<const HullRegion>(index, est.radius);
    est.components = est.region->component_count();
    est.area = est.region->area();
    return est;
}

}  // namespace rhull
