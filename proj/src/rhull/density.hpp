#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rhull/hull_region.hpp"

namespace rhull {

// A kernel K: R^2 -> [0, inf) integrating to one.
struct Kernel {
    std::string name;
    std::function<double(Point)> eval;
};

// Bivariate standard normal density.
Kernel gaussian_kernel();

// f_n(X_i) = 1 / (n h^2) * sum_j K((X_i - X_j) / h) for every sample i.
// Rows are summed in index order, so the values do not depend on threading.
std::vector<double> kde_at_samples(const PointSet& points, double h, const Kernel& kernel = gaussian_kernel());

// h0 * sigma * n^(-1 / (d + 4)).
double default_bandwidth(std::size_t n, int d, double h0, double sigma);
// As above with sigma the averaged coordinate standard deviation of the sample.
double default_bandwidth(const PointSet& points, double h0 = 1.0);

// Per-sample density values paired with the hull C_r they are restricted to.
class DensityField {
public:
    DensityField(RegionPtr region, std::vector<double> values, double bandwidth, std::string kernel = "gaussian");

    const HullRegion& region() const { return *region_; }
    const RegionPtr& region_ptr() const { return region_; }
    double at_sample(std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    double bandwidth() const { return bandwidth_; }
    const std::string& kernel() const { return kernel_; }

    // max over the Voronoi cells containing x of f_n(X_i), times 1{x in C_r}.
    double operator()(Point x) const;

private:
    RegionPtr region_;
    std::vector<double> values_;
    double bandwidth_;
    std::string kernel_;
};

double voronoi_max_density(Point x, const DensityField& field);

}  // namespace rhull
