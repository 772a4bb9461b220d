#include "rhull/spacing.hpp"

#include <algorithm>
#include <atomic>

#include "rhull/parallel.hpp"

namespace rhull {

double beta_const(int d) {
    if (d < 1) throw Error(ErrorCode::invalid_argument, "dimension must be at least 1");
    // sqrt(pi) Gamma(d/2 + 1) / Gamma((d + 1)/2) in closed form, so that the
    // even-dimensional values are exact rationals (beta(2) == 1).
    const int k = d / 2;
    double ratio = 1;
    if (d % 2 == 0) {
        // 4^k (k!)^2 / (2k)!
        for (int j = 1; j <= k; ++j) ratio *= 4.0 * j / (k + j);
    } else {
        // pi (2k + 2)! / (4^(k+1) (k+1)! k!)
        ratio = kPi;
        for (int j = 1; j <= k + 1; ++j) ratio *= (k + 1 + j) / 4.0;
        for (int j = 1; j <= k; ++j) ratio /= j;
    }
    double fact = 1;
    for (int j = 2; j <= d; ++j) fact *= j;
    return std::pow(ratio, d - 1) / fact;
}

double unit_ball_volume(int d) {
    if (d < 1) throw Error(ErrorCode::invalid_argument, "dimension must be at least 1");
    return std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0 + 1);
}

namespace {

void check_n(std::size_t n) {
    if (n < 3) throw Error(ErrorCode::sample_too_small, "the spacing test needs n >= 3 (log log n > 0)");
}

}  // namespace

double critical_value(std::size_t n, double alpha, int d) {
    if (!(alpha > 0 && alpha < 1)) throw Error(ErrorCode::alpha_out_of_range, "alpha must lie in (0, 1)");
    check_n(n);
    const double ln = std::log(static_cast<double>(n));
    return (-std::log(-std::log1p(-alpha)) + ln + (d - 1) * std::log(ln) + std::log(beta_const(d))) /
           static_cast<double>(n);
}

double u_statistic(double v, std::size_t n, int d) {
    check_n(n);
    const double ln = std::log(static_cast<double>(n));
    return static_cast<double>(n) * v - ln - (d - 1) * std::log(ln) - std::log(beta_const(d));
}

double ball_radius(double c, double f, int d) {
    const double dd = d;
    return std::pow(c, 1 / dd) * std::pow(unit_ball_volume(d), -1 / dd) * std::pow(f, -1 / dd);
}

OracleSpacing maximal_spacing_oracle(std::span<const Point> points, const Region& support,
                                     const std::function<double(Point)>& density, std::size_t resolution) {
    if (!(support.area() > 0)) throw Error(ErrorCode::degenerate_support, "support has zero area");
    if (resolution < 2) throw Error(ErrorCode::invalid_argument, "oracle grid resolution must be at least 2");
    IndexPtr index;
    if (!points.empty()) index = build_index(PointSet({points.begin(), points.end()}));
    const BBox box = support.bounds();
    const double step = std::max(box.width(), box.height()) / static_cast<double>(resolution);
    const auto nx = static_cast<std::size_t>(std::ceil(box.width() / step));
    const auto ny = static_cast<std::size_t>(std::ceil(box.height() / step));
    const double w = unit_ball_volume(2);

    OracleSpacing out;
    double fmax = 0;
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const Point x{box.lo.x + (static_cast<double>(ix) + 0.5) * step, box.lo.y + (static_cast<double>(iy) + 0.5) * step};
            if (!support.contains(x)) continue;
            ++out.grid_points;
            const double f = density(x);
            fmax = std::max(fmax, f);
            double room = support.boundary_distance(x);
            if (index) room = std::min(room, index->nearest_distance(x));
            const double gamma = std::sqrt(f * w) * room;
            if (gamma > out.delta) {
                out.delta = gamma;
                out.argmax = x;
            }
        }
    if (out.grid_points == 0) throw Error(ErrorCode::degenerate_support, "no grid point falls inside the support");
    out.v = out.delta * out.delta;
    out.error_bound = std::sqrt(fmax * w) * step * std::sqrt(0.5);
    return out;
}

RConvexityTester::RConvexityTester(IndexPtr index, double alpha, TestOptions options)
    : index_(std::move(index)), alpha_(alpha), options_(std::move(options)) {
    const std::size_t n = index_->size();
    c_ = critical_value(n, alpha_, 2);
    if (options_.angular_samples < 1) throw Error(ErrorCode::invalid_argument, "angular resolution must be positive");
    if (options_.density_override) {
        if (options_.density_override->size() != n)
            throw Error(ErrorCode::invalid_argument, "density override does not match the sample size");
        f_ = *options_.density_override;
        h_ = options_.bandwidth;
        for (double v : f_)
            if (!(v > 0)) throw Error(ErrorCode::invalid_argument, "density values must be positive");
    } else {
        h_ = options_.bandwidth > 0 ? options_.bandwidth : default_bandwidth(index_->points(), options_.h0);
        f_ = kde_at_samples(index_->points(), h_);
    }
    radii_.resize(n);
    m_ = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        radii_[i] = ball_radius(c_, f_[i], 2);
        m_ = std::min(m_, radii_[i]);
    }
    const HullRegion shape(index_, m_);
    for (std::size_t i = 0; i < n; ++i)
        if (shape.sample_on_boundary(i)) extremes_.push_back(i);
}

DensityField RConvexityTester::field(RegionPtr region) const { return DensityField(std::move(region), f_, h_); }

std::vector<Candidate> RConvexityTester::candidate_centers(const HullRegion& region) const {
    std::vector<Candidate> out;
    const std::size_t k = options_.angular_samples;
    for (std::size_t i : extremes_) {
        const Point xi = index_->point(i);
        for (std::size_t j = 0; j < k; ++j) {
            const double t = 2 * kPi * static_cast<double>(j) / static_cast<double>(k);
            const Point x{xi.x + radii_[i] * std::cos(t), xi.y + radii_[i] * std::sin(t)};
            if (!index_->in_voronoi_cell(x, i) || !region.contains(x)) continue;
            out.push_back({x, radii_[i], i, region.boundary_distance(x)});
        }
    }
    return out;
}

TestResult RConvexityTester::test(const HullRegion& region) const {
    if (&region.index() != index_.get()) throw Error(ErrorCode::invalid_argument, "region was built on another sample");
    TestResult res;
    res.r = region.radius();
    res.alpha = alpha_;
    res.n = index_->size();
    res.c_crit = c_;
    res.bandwidth = h_;
    res.m = m_;
    res.extreme_count = extremes_.size();
    res.angular_samples = options_.angular_samples;
    res.exhaustive = options_.exhaustive;
    res.components = region.component_count();

    struct Slot {
        std::size_t count = 0;
        double max_distance = 0;
        double max_margin = 0;
        std::optional<Witness> best;  // first rejecting candidate, or max margin when exhaustive
    };
    const std::size_t k = options_.angular_samples;
    const bool exhaustive = options_.exhaustive;
    std::vector<Slot> slots(extremes_.size());
    std::atomic<std::size_t> first_reject{kNone};

    parallel_for(extremes_.size(), [&](std::size_t pos) {
        if (!exhaustive && pos > first_reject.load()) return;
        const std::size_t i = extremes_[pos];
        const Point xi = index_->point(i);
        const double c_i = radii_[i];
        Slot& slot = slots[pos];
        for (std::size_t j = 0; j < k; ++j) {
            const double t = 2 * kPi * static_cast<double>(j) / static_cast<double>(k);
            const Point x{xi.x + c_i * std::cos(t), xi.y + c_i * std::sin(t)};
            if (!index_->in_voronoi_cell(x, i) || !region.contains(x)) continue;
            const double d = region.boundary_distance(x);
            ++slot.count;
            slot.max_distance = std::max(slot.max_distance, d);
            const double margin = d / c_i;
            if (exhaustive) {
                if (margin > slot.max_margin || !slot.best) {
                    slot.max_margin = margin;
                    slot.best = Witness{x, c_i, i, d};
                }
                continue;
            }
            if (d >= c_i) {
                slot.best = Witness{x, c_i, i, d};
                std::size_t cur = first_reject.load();
                while (pos < cur && !first_reject.compare_exchange_weak(cur, pos)) {
                }
                return;
            }
        }
    });

    if (exhaustive) {
        std::size_t count = 0;
        double max_d = 0, max_margin = 0;
        std::optional<Witness> best;
        for (const Slot& s : slots) {
            count += s.count;
            max_d = std::max(max_d, s.max_distance);
            if (s.best && (!best || s.max_margin > max_margin)) {
                max_margin = s.max_margin;
                best = s.best;
            }
        }
        res.candidate_count = count;
        res.max_boundary_distance = max_d;
        res.max_margin = max_margin;
        res.reject = best && best->boundary_distance >= best->radius;
        if (res.reject) res.witness = best;
    } else if (first_reject.load() != kNone) {
        res.reject = true;
        res.witness = slots[first_reject.load()].best;
    }
    return res;
}

TestResult RConvexityTester::test(double r) const {
    if (!(r > 0)) throw Error(ErrorCode::invalid_argument, "test radius must be positive");
    return test(HullRegion(index_, r));
}

std::vector<Candidate> candidate_centers(const HullRegion& region, const DensityField& field, double alpha,
                                         std::size_t angular_samples) {
    TestOptions opt;
    opt.angular_samples = angular_samples;
    opt.density_override = field.values();
    opt.bandwidth = field.bandwidth();
    return RConvexityTester(region.index_ptr(), alpha, opt).candidate_centers(region);
}

TestResult test_r_convexity(IndexPtr index, double r, double alpha, const TestOptions& options) {
    return RConvexityTester(std::move(index), alpha, options).test(r);
}

TestResult test_r_convexity(const DensityField& field, double alpha, std::size_t angular_samples, bool exhaustive) {
    TestOptions opt;
    opt.angular_samples = angular_samples;
    opt.exhaustive = exhaustive;
    opt.density_override = field.values();
    opt.bandwidth = field.bandwidth();
    return RConvexityTester(field.region().index_ptr(), alpha, opt).test(field.region());
}

}  // namespace rhull
