#pragma once

#include <functional>
#include <optional>
#include <span>

#include "rhull/density.hpp"

namespace rhull {

// Janson's constant: (1/d!) * (sqrt(pi) Gamma(d/2 + 1) / Gamma((d + 1)/2))^(d - 1).
double beta_const(int d);

// Lebesgue measure of the unit ball in R^d.
double unit_ball_volume(int d);

// c_{n,alpha} = (-log(-log(1 - alpha)) + log n + (d - 1) log log n + log beta) / n.
double critical_value(std::size_t n, double alpha, int d = 2);

// U = n V - log n - (d - 1) log log n - log beta.
double u_statistic(double v, std::size_t n, int d = 2);

// Radius of the ball x + (c / f)^(1/d) A, i.e. c^(1/d) w_d^(-1/d) f^(-1/d).
double ball_radius(double c, double f, int d = 2);

struct OracleSpacing {
    double delta = 0;  // Delta_n
    double v = 0;      // Delta_n^d
    Point argmax;
    double error_bound = 0;  // bound on |delta - grid maximum|
    std::size_t grid_points = 0;
};

// Grid maximisation of f(x)^(1/2) w^(1/2) min(d(x, X_n), d(x, boundary of S))
// over lattice points x in S (res x res over the support's bounding box).
// The sample may be empty. Simulation use only: S and f must be the truth.
OracleSpacing maximal_spacing_oracle(std::span<const Point> points, const Region& support,
                                     const std::function<double(Point)>& density, std::size_t resolution = 256);

struct Candidate {
    Point center;
    double radius = 0;       // c^{X_i,w}
    std::size_t sample = kNone;
    double boundary_distance = 0;  // d(center, boundary of C_r)
};

struct Witness {
    Point center;
    double radius = 0;
    std::size_t sample = kNone;
    double boundary_distance = 0;
};

struct TestOptions {
    double h0 = 1.0;
    double bandwidth = 0;  // 0 selects the default rule
    std::size_t angular_samples = 128;
    // Evaluate every candidate instead of stopping at the first witness.
    bool exhaustive = false;
    // Replaces the kernel estimate at the samples (e.g. the true density in
    // simulations).
    std::optional<std::vector<double>> density_override;
};

struct TestResult {
    double r = 0;
    double alpha = 0;
    std::size_t n = 0;
    int d = 2;
    double c_crit = 0;
    double bandwidth = 0;
    double m = 0;  // smallest per-sample radius
    std::size_t extreme_count = 0;
    std::size_t angular_samples = 0;
    bool exhaustive = false;
    bool reject = false;
    std::optional<Witness> witness;
    std::size_t components = 0;
    // Exhaustive runs only.
    std::optional<std::size_t> candidate_count;
    std::optional<double> max_boundary_distance;  // M(r)
    std::optional<double> max_margin;             // max boundary_distance / radius
};

// The r-convexity test with everything that does not depend on r computed
// once: density values at the samples, per-sample radii, E(m).
class RConvexityTester {
public:
    RConvexityTester(IndexPtr index, double alpha, TestOptions options = {});

    const TriangulationIndex& index() const { return *index_; }
    const IndexPtr& index_ptr() const { return index_; }
    double alpha() const { return alpha_; }
    double c_crit() const { return c_; }
    double bandwidth() const { return h_; }
    double m() const { return m_; }
    const std::vector<double>& density() const { return f_; }
    const std::vector<double>& radii() const { return radii_; }
    const std::vector<std::size_t>& extremes() const { return extremes_; }
    const TestOptions& options() const { return options_; }

    DensityField field(RegionPtr region) const;

    // D(r) with boundary distances.
    std::vector<Candidate> candidate_centers(const HullRegion& region) const;

    TestResult test(const HullRegion& region) const;
    TestResult test(double r) const;

private:
    IndexPtr index_;
    double alpha_;
    TestOptions options_;
    double c_ = 0;
    double h_ = 0;
    double m_ = 0;
    std::vector<double> f_;
    std::vector<double> radii_;
    std::vector<std::size_t> extremes_;
};

// Free-function forms.
std::vector<Candidate> candidate_centers(const HullRegion& region, const DensityField& field, double alpha,
                                         std::size_t angular_samples = 128);
TestResult test_r_convexity(IndexPtr index, double r, double alpha, const TestOptions& options = {});
// Uses the field's region as C_r and its values as the density at the samples.
TestResult test_r_convexity(const DensityField& field, double alpha, std::size_t angular_samples = 128,
                            bool exhaustive = false);

}  // namespace rhull
