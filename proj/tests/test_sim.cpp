#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

#include "rhull/sim.hpp"

using namespace rhull;

namespace {

SyntheticModel annulus_model() { return {SyntheticSupport::annulus({0, 0}, 0.35, 1), 0}; }
SyntheticModel disc_model() { return {SyntheticSupport::disc({0, 0}, 1), 0}; }

struct ThreadEnv {
    explicit ThreadEnv(const char* v) {
        if (const char* old = std::getenv("RHULL_THREADS")) saved = old;
        setenv("RHULL_THREADS", v, 1);
    }
    ~ThreadEnv() {
        if (saved.empty()) unsetenv("RHULL_THREADS");
        else setenv("RHULL_THREADS", saved.c_str(), 1);
    }
    std::string saved;
};

}  // namespace

TEST(Summaries, QuantilesInterpolateLinearly) {
    // Type-7 quantiles of 1..10: position p * 9.
    std::vector<double> v{7, 3, 10, 1, 5, 2, 9, 4, 8, 6};
    const auto q = summarize(v);
    EXPECT_DOUBLE_EQ(q.median, 5.5);
    EXPECT_DOUBLE_EQ(q.q25, 3.25);
    EXPECT_DOUBLE_EQ(q.q75, 7.75);
    EXPECT_DOUBLE_EQ(q.iqr, 4.5);
    EXPECT_EQ(q.min, 1);
    EXPECT_EQ(q.max, 10);
    // m = 10: order statistics floor(5 - 3.099) = 1 and ceil(5 + 3.099) = 9.
    EXPECT_DOUBLE_EQ(q.median_se, (10.0 - 2.0) / (2 * 1.96));
    EXPECT_TRUE(std::isnan(summarize({}).median));
}

TEST(Summaries, LineFitMatchesNormalEquations) {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> exact{3, 5, 7, 9, 11};
    auto f = fit_line(x, exact);
    EXPECT_NEAR(f.slope, 2, 1e-14);
    EXPECT_NEAR(f.intercept, 1, 1e-13);
    EXPECT_NEAR(f.standard_error, 0, 1e-13);

    // Residuals (0.1, -0.2, 0.1, 0.2, -0.2) around y = 2x + 1: the slope moves
    // by sum((x - 3) e) / 10 = -0.02, and its variance is s^2 / Sxx.
    const std::vector<double> y{3.1, 4.8, 7.1, 9.2, 10.8};
    f = fit_line(x, y);
    EXPECT_NEAR(f.slope, 1.98, 1e-12);
    const double b = 1.98, a = 7.0 - b * 3;
    EXPECT_NEAR(f.intercept, a, 1e-12);
    double ssr = 0;
    for (std::size_t i = 0; i < 5; ++i) ssr += (y[i] - a - b * x[i]) * (y[i] - a - b * x[i]);
    EXPECT_NEAR(f.standard_error, std::sqrt(ssr / 3 / 10), 1e-12);
    EXPECT_THROW(fit_line({1, 2}, {1, 2}), Error);
}

TEST(Seeds, LedgerIsInjectiveOverCells) {
    std::set<std::uint64_t> seen;
    for (std::size_t j = 0; j < 6; ++j)
        for (std::size_t k = 0; k < 50; ++k) seen.insert(replicate_seed(42, j, 50, k));
    EXPECT_EQ(seen.size(), 300u);
    EXPECT_EQ(replicate_seed(42, 1, 50, 3), derive_seed(42, 53));
}

TEST(LevelPower, ValidatesDesign) {
    LevelPowerConfig c;
    c.r_grid = {1};
    c.replicates = 49;
    EXPECT_THROW(level_power_study(disc_model(), c), Error);
    c.replicates = 50;
    c.r_grid = {};
    EXPECT_THROW(level_power_study(disc_model(), c), Error);
}

TEST(LevelPower, ScheduleDoesNotChangeResults) {
    LevelPowerConfig c;
    c.r_grid = {0.2, 5};
    c.n = 300;
    c.replicates = 50;
    c.seed = 9;
    LevelPowerReport one, many;
    {
        ThreadEnv env("1");
        one = level_power_study(annulus_model(), c);
    }
    {
        ThreadEnv env("4");
        many = level_power_study(annulus_model(), c);
    }
    ASSERT_EQ(one.rows.size(), 100u);
    for (std::size_t i = 0; i < one.rows.size(); ++i) {
        EXPECT_EQ(one.rows[i].reject, many.rows[i].reject);
        EXPECT_EQ(one.rows[i].seed, many.rows[i].seed);
    }
    EXPECT_EQ(to_json(one).dump(), to_json(many).dump());
    EXPECT_EQ(one.seeds.front(), replicate_seed(9, 0, 50, 0));
}

TEST(LevelPower, SummaryMatchesRows) {
    LevelPowerConfig c;
    c.r_grid = {0.2, 5};
    c.n = 400;
    c.replicates = 50;
    const auto rep = level_power_study(annulus_model(), c);
    for (std::size_t g = 0; g < 2; ++g) {
        std::size_t count = 0;
        for (const auto& row : rep.rows)
            if (row.r == c.r_grid[g]) count += row.reject;
        EXPECT_EQ(rep.summary[g].rejections, count);
        const double p = double(count) / 50;
        EXPECT_DOUBLE_EQ(rep.summary[g].standard_error, std::sqrt(p * (1 - p) / 50));
    }
    // The hole is large against the sample spacing at n = 400.
    EXPECT_GE(rep.summary[1].rate, 0.9);
    EXPECT_LE(rep.summary[0].rate, 0.2);

    const std::string csv = rows_csv(rep);
    EXPECT_EQ(csv.rfind("replicate,seed,r,reject,components\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 101);
}

TEST(Consistency, ReportsQuantilesAndBias) {
    ConsistencyConfig c;
    c.n_grid = {400};
    c.replicates = 6;
    c.seed = 3;
    const auto rep = consistency_study(annulus_model(), c);
    ASSERT_EQ(rep.summary.size(), 1u);
    const auto& s = rep.summary[0];
    EXPECT_EQ(s.finite + s.convex_hull, 6u);
    ASSERT_TRUE(s.median_bias.has_value());
    EXPECT_DOUBLE_EQ(*s.median_bias, s.r_hat.median - 0.35);
    EXPECT_GT(s.r_hat.median, 0.2);
    EXPECT_LT(s.r_hat.median, 0.6);
    const auto j = to_json(rep);
    EXPECT_EQ(j["study"], "consistency");
    EXPECT_EQ(j["seeds"].size(), 6u);
    EXPECT_EQ(j["model"]["support"]["r0"], 0.35);
}

TEST(Rate, RequiresWideGrid) {
    RateConfig c;
    c.n_grid = {250, 500, 1000};
    c.replicates = 1;
    EXPECT_THROW(rate_study(annulus_model(), c), Error);
}

TEST(Rate, SmallRunFitsPositiveSlopes) {
    RateConfig c;
    c.n_grid = {100, 400, 3200};
    c.replicates = 3;
    c.measure_samples = 20000;
    const auto rep = rate_study(annulus_model(), c);
    ASSERT_EQ(rep.summary.size(), 3u);
    EXPECT_GT(rep.hausdorff_fit.slope, 0);
    EXPECT_GT(rep.measure_fit.slope, 0);
    EXPECT_GT(rep.summary[0].hausdorff.median, rep.summary[2].hausdorff.median);
    for (const auto& row : rep.rows) {
        EXPECT_GE(row.hausdorff, 0);
        EXPECT_GE(row.boundary_hausdorff, 0);
        EXPECT_GT(row.measure, 0);
    }
    const auto j = to_json(rep);
    EXPECT_EQ(j["fits"]["theoretical_slope"], 2.0 / 3.0);
    EXPECT_TRUE(j["fits"]["hausdorff"].contains("standard_error"));
    const std::string csv = rows_csv(rep);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
}

TEST(Serialisation, ModelRoundTrip) {
    const std::vector<SyntheticModel> models{
        annulus_model(),
        {SyntheticSupport::disc({1, 2}, 3), 0.5},
        {SyntheticSupport::union_of_discs({{{0, 0}, 1}, {{4, 0.5}, 0.6}}), 0},
        {SyntheticSupport::rectangle({0, 0}, {2, 1}), -0.25},
    };
    for (const auto& m : models) {
        const auto back = model_from_json(to_json(m));
        EXPECT_EQ(to_json(back).dump(), to_json(m).dump());
        EXPECT_DOUBLE_EQ(back.support.area(), m.support.area());
    }
    try {
        model_from_json(nlohmann::json::parse(R"({"support": {"shape": "star"}})"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::parse_error);
    }
    try {
        model_from_json(nlohmann::json::parse(R"({"support": {"shape": "disc"}})"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::parse_error);
    }
}

TEST(Serialisation, SelectionConfigRoundTrip) {
    SelectionConfig c;
    c.alpha = 0.02;
    c.max_components = 7;
    c.r_max = 3;
    c.seed = 11;
    const auto back = selection_from_json(to_json(c));
    EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
    const auto rc = rate_config_from_json(nlohmann::json::parse(
        R"({"n_grid": [250, 8000], "replicates": 5, "selection": {"nu": 0.9}})"));
    EXPECT_EQ(rc.n_grid.size(), 2u);
    EXPECT_EQ(rc.selection.nu, 0.9);
    EXPECT_EQ(rc.selection.alpha, 0.01);
    EXPECT_THROW(level_power_config_from_json(nlohmann::json::parse("{}")), Error);
}
