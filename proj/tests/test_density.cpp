#include <gtest/gtest.h>

#include "rhull/density.hpp"
#include "rhull/random.hpp"
#include "support/oracles.hpp"

using namespace rhull;

namespace {

std::vector<Point> normal_sample(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<Point> pts(n);
    for (auto& p : pts) p = {z(rng), z(rng)};
    return pts;
}

// Independent naive evaluation of the bivariate Gaussian KDE.
std::vector<double> naive_kde(const std::vector<Point>& pts, double h) {
    std::vector<double> out;
    for (const auto& p : pts) {
        double s = 0;
        for (const auto& q : pts) {
            const double dx = (p.x - q.x) / h, dy = (p.y - q.y) / h;
            s += std::exp(-(dx * dx + dy * dy) / 2) / (2 * M_PI);
        }
        out.push_back(s / (double(pts.size()) * h * h));
    }
    return out;
}

}  // namespace

TEST(Kde, SinglePoint) {
    for (double h : {0.1, 1.0, 3.0}) {
        const auto f = kde_at_samples(PointSet({{4, -2}}), h);
        EXPECT_DOUBLE_EQ(f[0], 1 / (2 * kPi * h * h));
    }
}

TEST(Kde, TranslationInvariant) {
    auto pts = normal_sample(200, 1);
    const auto f = kde_at_samples(PointSet(pts), 0.4);
    for (auto& p : pts) p = p + Point{0.375, -1.25};
    const auto g = kde_at_samples(PointSet(pts), 0.4);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(f[i], g[i], 1e-14 * f[i]);
}

TEST(Kde, MatchesNaiveDoubleLoop) {
    const auto pts = normal_sample(500, 2);
    const PointSet ps(pts);
    const double h = default_bandwidth(ps);
    const auto f = kde_at_samples(ps, h);
    const auto g = naive_kde(pts, h);
    double mad = 0;
    for (std::size_t i = 0; i < f.size(); ++i) mad += std::fabs(f[i] - g[i]);
    EXPECT_LE(mad / double(f.size()), 1e-15);
}

TEST(Kde, ScalesWithCoordinates) {
    auto pts = normal_sample(150, 3);
    const auto f = kde_at_samples(PointSet(pts), 0.5);
    const double s = 3.5;
    for (auto& p : pts) p = s * p;
    const auto g = kde_at_samples(PointSet(pts), 0.5 * s);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(g[i], f[i] / (s * s), 1e-13 * f[i]);
}

TEST(Kde, RejectsNonpositiveBandwidth) {
    try {
        kde_at_samples(PointSet({{0, 0}}), 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::nonpositive_bandwidth);
    }
    EXPECT_THROW(kde_at_samples(PointSet({{0, 0}}), -1), Error);
}

TEST(Bandwidth, DefaultRule) {
    EXPECT_DOUBLE_EQ(default_bandwidth(PointSet({{3, 3}}), 2.0), 2.0);
    EXPECT_NEAR(default_bandwidth(1000000, 2, 1, 1), 0.1, 1e-15);
    // d = 2: exponent -1/6, so 64 times more points halves h.
    EXPECT_NEAR(default_bandwidth(6400, 2, 1, 1) / default_bandwidth(100, 2, 1, 1), 0.5, 1e-15);
    const PointSet ps({{0, 0}, {2, 0}, {0, 4}, {2, 4}});
    // sd_x = sqrt(4/3), sd_y = sqrt(16/3)
    const double sigma = 0.5 * (std::sqrt(4.0 / 3) + std::sqrt(16.0 / 3));
    EXPECT_NEAR(default_bandwidth(ps, 1.5), 1.5 * sigma * std::pow(4.0, -1.0 / 6), 1e-15);
}

TEST(VoronoiMax, CellInteriorBoundaryAndOutside) {
    const std::vector<Point> pts{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 0.4}};
    auto idx = build_index(PointSet(pts));
    auto region = std::make_shared<const HullRegion>(idx, kInf);
    const DensityField field(region, {1, 2, 3, 4, 5}, 1.0);
    EXPECT_EQ(voronoi_max_density({0.05, 0.05}, field), 1);
    EXPECT_EQ(voronoi_max_density({0.95, 0.95}, field), 4);
    EXPECT_EQ(voronoi_max_density({0.5, 0.4}, field), 5);
    EXPECT_EQ(voronoi_max_density({2, 2}, field), 0);
    // (0.5, 0.97) is equidistant from (0, 1) and (1, 1) and farther from the rest.
    EXPECT_EQ(voronoi_max_density({0.5, 0.97}, field), 4);
}

TEST(VoronoiMax, ZeroExactlyOutsideAndDominatesNearest) {
    const auto pts = oracle::uniform_disc(300, 4);
    auto idx = build_index(PointSet(pts));
    auto region = std::make_shared<const HullRegion>(idx, 0.2);
    const auto values = kde_at_samples(idx->points(), 0.3);
    const DensityField field(region, values, 0.3);
    Rng rng(1);
    for (int k = 0; k < 5000; ++k) {
        const Point x{rng.uniform(-1.1, 1.1), rng.uniform(-1.1, 1.1)};
        const double v = field(x);
        if (!region->contains(x)) {
            EXPECT_EQ(v, 0);
            continue;
        }
        EXPECT_GT(v, 0);
        EXPECT_GE(v, values[oracle::brute_nearest(pts, x)]);
    }
}
