#include "rhull/density.hpp"

#include "rhull/parallel.hpp"

namespace rhull {

Kernel gaussian_kernel() {
    return {"gaussian", [](Point u) { return std::exp(-0.5 * dot(u, u)) / (2 * kPi); }};
}

std::vector<double> kde_at_samples(const PointSet& points, double h, const Kernel& kernel) {
    if (!(h > 0) || !std::isfinite(h)) throw Error(ErrorCode::nonpositive_bandwidth, "bandwidth must be positive");
    const std::size_t n = points.size();
    const double inv_h = 1 / h;
    const double norm_const = 1 / (static_cast<double>(n) * h * h);
    std::vector<double> out(n);
    if (kernel.name == "gaussian") {
        const double c = 1 / (2 * kPi);
        parallel_for(n, [&](std::size_t i) {
            const Point xi = points[i];
            double sum = 0;
            for (std::size_t j = 0; j < n; ++j) {
                const Point u = inv_h * (xi - points[j]);
                sum += c * std::exp(-0.5 * dot(u, u));
            }
            out[i] = norm_const * sum;
        });
        return out;
    }
    parallel_for(n, [&](std::size_t i) {
        const Point xi = points[i];
        double sum = 0;
        for (std::size_t j = 0; j < n; ++j) sum += kernel.eval(inv_h * (xi - points[j]));
        out[i] = norm_const * sum;
    });
    return out;
}

double default_bandwidth(std::size_t n, int d, double h0, double sigma) {
    if (n == 0) throw Error(ErrorCode::invalid_argument, "bandwidth rule needs n >= 1");
    if (!(h0 > 0) || !(sigma > 0)) throw Error(ErrorCode::nonpositive_bandwidth, "bandwidth scale must be positive");
    return h0 * sigma * std::pow(static_cast<double>(n), -1.0 / (d + 4));
}

double default_bandwidth(const PointSet& points, double h0) {
    return default_bandwidth(points.size(), 2, h0, points.mean_coordinate_sd());
}

DensityField::DensityField(RegionPtr region, std::vector<double> values, double bandwidth, std::string kernel)
    : region_(std::move(region)), values_(std::move(values)), bandwidth_(bandwidth), kernel_(std::move(kernel)) {
    if (values_.size() != region_->index().size())
        throw Error(ErrorCode::invalid_argument, "density values do not match the sample size");
}

double DensityField::operator()(Point x) const {
    if (!region_->contains(x)) return 0;
    double best = 0;
    for (std::size_t i : region_->index().nearest_all(x)) best = std::max(best, values_[i]);
    return best;
}

double voronoi_max_density(Point x, const DensityField& field) { return field(x); }

}  // namespace rhull
