#include "rhull/synthetic.hpp"

#include <algorithm>

namespace rhull {

namespace {

std::vector<Point> circle_samples(Point c, double radius, double step) {
    const auto k = static_cast<std::size_t>(std::max(8.0, std::ceil(2 * kPi * radius / step)));
    std::vector<Point> out(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double t = 2 * kPi * static_cast<double>(j) / static_cast<double>(k);
        out[j] = {c.x + radius * std::cos(t), c.y + radius * std::sin(t)};
    }
    return out;
}

}  // namespace

SyntheticSupport SyntheticSupport::disc(Point center, double radius) {
    if (!(radius > 0) || !std::isfinite(radius)) throw Error(ErrorCode::degenerate_support, "disc radius must be positive");
    SyntheticSupport s;
    s.kind_ = Kind::disc;
    s.discs_ = {{center, radius}};
    s.r0_ = kInf;
    s.finish();
    return s;
}

SyntheticSupport SyntheticSupport::annulus(Point center, double inner, double outer) {
    if (!(inner > 0) || !(outer > inner) || !std::isfinite(outer))
        throw Error(ErrorCode::degenerate_support, "annulus needs 0 < inner < outer");
    SyntheticSupport s;
    s.kind_ = Kind::annulus;
    s.discs_ = {{center, outer}};
    s.inner_ = inner;
    s.r0_ = inner;
    s.finish();
    return s;
}

SyntheticSupport SyntheticSupport::union_of_discs(std::vector<Disc> discs) {
    if (discs.empty()) throw Error(ErrorCode::degenerate_support, "union of discs needs at least one disc");
    for (const auto& d : discs)
        if (!(d.radius > 0) || !std::isfinite(d.radius))
            throw Error(ErrorCode::degenerate_support, "disc radius must be positive");
    for (std::size_t i = 0; i < discs.size(); ++i)
        for (std::size_t j = i + 1; j < discs.size(); ++j)
            if (dist(discs[i].center, discs[j].center) <= discs[i].radius + discs[j].radius)
                throw Error(ErrorCode::degenerate_support, "discs in a union must be disjoint");
    SyntheticSupport s;
    s.kind_ = Kind::discs;
    s.discs_ = std::move(discs);
    if (s.discs_.size() == 1) s.r0_ = kInf;
    s.finish();
    return s;
}

SyntheticSupport SyntheticSupport::rectangle(Point lo, Point hi) {
    if (!(hi.x > lo.x) || !(hi.y > lo.y)) throw Error(ErrorCode::degenerate_support, "rectangle has zero area");
    SyntheticSupport s;
    s.kind_ = Kind::rectangle;
    s.rect_ = {lo, hi};
    s.r0_ = kInf;
    s.finish();
    return s;
}

void SyntheticSupport::finish() {
    if (kind_ == Kind::rectangle) {
        bounds_ = rect_;
        area_ = rect_.area();
        centroid_ = 0.5 * (rect_.lo + rect_.hi);
        return;
    }
    Point weighted{0, 0};
    for (const auto& d : discs_) {
        bounds_.add(BBox{{d.center.x - d.radius, d.center.y - d.radius}, {d.center.x + d.radius, d.center.y + d.radius}});
        const double a = kPi * d.radius * d.radius;
        area_ += a;
        weighted = weighted + a * d.center;
    }
    if (kind_ == Kind::annulus) area_ -= kPi * inner_ * inner_;
    centroid_ = kind_ == Kind::discs ? (1 / area_) * weighted : discs_[0].center;
}

std::string SyntheticSupport::name() const {
    switch (kind_) {
        case Kind::disc: return "disc";
        case Kind::annulus: return "annulus";
        case Kind::discs: return "discs";
        case Kind::rectangle: return "rectangle";
    }
    return "unknown";
}

bool SyntheticSupport::contains(Point p) const {
    switch (kind_) {
        case Kind::rectangle: return rect_.contains(p);
        case Kind::annulus: {
            const double r = dist(p, discs_[0].center);
            return r >= inner_ && r <= discs_[0].radius;
        }
        default:
            for (const auto& d : discs_)
                if (dist(p, d.center) <= d.radius) return true;
            return false;
    }
}

double SyntheticSupport::boundary_distance(Point p) const {
    switch (kind_) {
        case Kind::rectangle: {
            if (rect_.contains(p))
                return std::min({p.x - rect_.lo.x, rect_.hi.x - p.x, p.y - rect_.lo.y, rect_.hi.y - p.y});
            const double dx = std::max({rect_.lo.x - p.x, 0.0, p.x - rect_.hi.x});
            const double dy = std::max({rect_.lo.y - p.y, 0.0, p.y - rect_.hi.y});
            return std::hypot(dx, dy);
        }
        case Kind::annulus: {
            const double r = dist(p, discs_[0].center);
            return std::min(std::fabs(r - inner_), std::fabs(r - discs_[0].radius));
        }
        default: {
            double best = kInf;
            for (const auto& d : discs_) best = std::min(best, std::fabs(dist(p, d.center) - d.radius));
            return best;
        }
    }
}

std::vector<Point> SyntheticSupport::boundary_samples(double step) const {
    if (!(step > 0)) throw Error(ErrorCode::invalid_argument, "boundary sampling step must be positive");
    std::vector<Point> out;
    if (kind_ == Kind::rectangle) {
        const Point corners[4] = {rect_.lo, {rect_.hi.x, rect_.lo.y}, rect_.hi, {rect_.lo.x, rect_.hi.y}};
        for (int k = 0; k < 4; ++k) {
            const Point a = corners[k], b = corners[(k + 1) % 4];
            const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(dist(a, b) / step)));
            for (std::size_t j = 0; j < m; ++j) out.push_back(a + (static_cast<double>(j) / static_cast<double>(m)) * (b - a));
        }
        return out;
    }
    for (const auto& d : discs_) {
        auto c = circle_samples(d.center, d.radius, step);
        out.insert(out.end(), c.begin(), c.end());
    }
    if (kind_ == Kind::annulus) {
        auto c = circle_samples(discs_[0].center, inner_, step);
        out.insert(out.end(), c.begin(), c.end());
    }
    return out;
}

SyntheticDensity SyntheticDensity::ramp(const SyntheticSupport& support, double slope) {
    if (!(std::fabs(slope) < 1)) throw Error(ErrorCode::invalid_argument, "ramp slope must lie in (-1, 1)");
    SyntheticDensity d;
    d.support_ = std::make_shared<const SyntheticSupport>(support);
    d.slope_ = slope;
    d.x_bar_ = support.centroid().x;
    const BBox b = support.bounds();
    d.half_width_ = std::max(d.x_bar_ - b.lo.x, b.hi.x - d.x_bar_);
    d.area_ = support.area();
    return d;
}

double SyntheticDensity::operator()(Point p) const {
    if (!support_->contains(p)) return 0;
    return (1 + slope_ * (p.x - x_bar_) / half_width_) / area_;
}

std::vector<Point> sample_points(const SyntheticSupport& support, const SyntheticDensity& density, std::size_t n,
                                 std::uint64_t seed) {
    if (!(support.area() > 0)) throw Error(ErrorCode::degenerate_support, "support has zero area");
    Rng rng(seed);
    const BBox b = support.bounds();
    const double fmax = density.f1();
    std::vector<Point> out;
    out.reserve(n);
    while (out.size() < n) {
        const Point p{rng.uniform(b.lo.x, b.hi.x), rng.uniform(b.lo.y, b.hi.y)};
        if (!support.contains(p)) continue;
        if (!density.is_uniform() && rng.uniform() * fmax > density(p)) continue;
        out.push_back(p);
    }
    return out;
}

}  // namespace rhull
