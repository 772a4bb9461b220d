#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rhull/random.hpp"
#include "rhull/region.hpp"

namespace rhull {

struct Disc {
    Point center;
    double radius = 1;
};

// Known support for simulations: disc, annulus, union of disjoint discs or
// axis-aligned rectangle, with exact membership, boundary distance and area.
class SyntheticSupport final : public Region {
public:
    enum class Kind { disc, annulus, discs, rectangle };

    static SyntheticSupport disc(Point center, double radius);
    static SyntheticSupport annulus(Point center, double inner, double outer);
    static SyntheticSupport union_of_discs(std::vector<Disc> discs);
    static SyntheticSupport rectangle(Point lo, Point hi);

    Kind kind() const { return kind_; }
    std::string name() const;
    // Largest r for which the support is r-convex, when known in closed form.
    // Convex shapes report infinity.
    std::optional<double> r0() const { return r0_; }
    Point centroid() const { return centroid_; }

    bool contains(Point p) const override;
    double boundary_distance(Point p) const override;
    BBox bounds() const override { return bounds_; }
    std::vector<Point> boundary_samples(double step) const override;
    double area() const override { return area_; }

    const std::vector<Disc>& discs() const { return discs_; }
    double inner_radius() const { return inner_; }
    const BBox& rectangle_box() const { return rect_; }

private:
    SyntheticSupport() = default;
    void finish();

    Kind kind_ = Kind::disc;
    std::vector<Disc> discs_;  // disc / annulus outer circle / union members
    double inner_ = 0;         // annulus hole radius
    BBox rect_;
    BBox bounds_;
    double area_ = 0;
    Point centroid_;
    std::optional<double> r0_;
};

// Uniform density, or the linear ramp f(x) = (1 + s (x - x̄) / w) / |S| with
// x̄ the support centroid abscissa and w the largest |x - x̄| on S; |s| < 1
// keeps f bounded away from zero and the mean term integrates to zero.
class SyntheticDensity {
public:
    static SyntheticDensity uniform(const SyntheticSupport& support) { return ramp(support, 0.0); }
    static SyntheticDensity ramp(const SyntheticSupport& support, double slope);

    double operator()(Point p) const;
    double f0() const { return (1 - std::fabs(slope_)) / area_; }
    double f1() const { return (1 + std::fabs(slope_)) / area_; }
    // Lipschitz constant on the support.
    double lipschitz() const { return std::fabs(slope_) / (half_width_ * area_); }
    double slope() const { return slope_; }
    bool is_uniform() const { return slope_ == 0; }

private:
    std::shared_ptr<const SyntheticSupport> support_;
    double slope_ = 0;
    double x_bar_ = 0;
    double half_width_ = 1;
    double area_ = 1;
};

// n i.i.d. draws by rejection from the bounding box. Deterministic per seed.
std::vector<Point> sample_points(const SyntheticSupport& support, const SyntheticDensity& density, std::size_t n,
                                 std::uint64_t seed);

}  // namespace rhull
