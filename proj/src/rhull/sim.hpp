#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rhull/select.hpp"
#include "rhull/spacing.hpp"
#include "rhull/synthetic.hpp"

namespace rhull {

// A known support with a density on it. `slope` 0 is the uniform density.
struct SyntheticModel {
    SyntheticSupport support = SyntheticSupport::disc({0, 0}, 1);
    double slope = 0;

    SyntheticDensity density() const { return SyntheticDensity::ramp(support, slope); }
};

// Called as (finished, total) after each replicate, from worker threads but
// never concurrently.
using Progress = std::function<void(std::size_t, std::size_t)>;

// Replicate k of cell j (one n, or the single design of a level study) is
// drawn with derive_seed(seed, j * replicates + k).
std::uint64_t replicate_seed(std::uint64_t seed, std::size_t cell, std::size_t replicates, std::size_t k);

struct QuantileSummary {
    double median = 0, q25 = 0, q75 = 0, iqr = 0, min = 0, max = 0;
    // Distribution-free standard error of the median from the order
    // statistics bracketing a 95% interval.
    double median_se = 0;
};
QuantileSummary summarize(std::vector<double> values);

struct SlopeFit {
    double slope = 0;
    double intercept = 0;
    double standard_error = 0;
};
// Ordinary least squares of y on x; needs at least three points.
SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// ---- level and power ----------------------------------------------------

struct LevelPowerConfig {
    std::vector<double> r_grid;
    double alpha = 0.05;
    std::size_t n = 1000;
    std::size_t replicates = 200;
    std::uint64_t seed = 0;
    TestOptions test;
};

struct LevelPowerRow {
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    double r = 0;
    bool reject = false;
    std::size_t components = 0;
};

struct RejectionRate {
    double r = 0;
    std::size_t rejections = 0;
    double rate = 0;
    double standard_error = 0;  // binomial
};

struct LevelPowerReport {
    SyntheticModel model;
    LevelPowerConfig config;
    std::vector<RejectionRate> summary;
    std::vector<LevelPowerRow> rows;
    std::vector<std::uint64_t> seeds;
};

// Every r of the grid is tested on the same replicate samples.
LevelPowerReport level_power_study(const SyntheticModel& model, const LevelPowerConfig& config,
                                   const Progress& progress = {});

// ---- consistency of the selected radius ----------------------------------

struct ConsistencyConfig {
    std::vector<std::size_t> n_grid;
    std::size_t replicates = 100;
    std::uint64_t seed = 0;
    SelectionConfig selection;
};

struct ConsistencyRow {
    std::size_t n = 0;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    double r_hat = 0;
    Fallback fallback = Fallback::none;
    std::size_t components = 0;
};

struct ConsistencyAtN {
    std::size_t n = 0;
    QuantileSummary r_hat;  // over finite selections
    std::size_t finite = 0;
    std::size_t component_cap = 0;
    std::size_t convex_hull = 0;
    std::optional<double> median_bias;  // median r̂₀ minus the known r₀
};

struct ConsistencyReport {
    SyntheticModel model;
    ConsistencyConfig config;
    std::vector<ConsistencyAtN> summary;
    std::vector<ConsistencyRow> rows;
    std::vector<std::uint64_t> seeds;
};

ConsistencyReport consistency_study(const SyntheticModel& model, const ConsistencyConfig& config,
                                    const Progress& progress = {});

// ---- convergence rate ------------------------------------------------------

struct RateConfig {
    std::vector<std::size_t> n_grid;
    std::size_t replicates = 50;
    std::uint64_t seed = 0;
    SelectionConfig selection;  // selection.nu shrinks r̂₀
    double metric_step = 0;     // 0: default_metric_step
    std::size_t measure_samples = 200000;
};

struct RateRow {
    std::size_t n = 0;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    double r_hat = 0;
    double radius = 0;
    Fallback fallback = Fallback::none;
    double hausdorff = 0;
    double boundary_hausdorff = 0;
    double measure = 0;
};

struct RateAtN {
    std::size_t n = 0;
    QuantileSummary hausdorff, boundary_hausdorff, measure;
};

struct RateReport {
    SyntheticModel model;
    RateConfig config;
    std::vector<RateAtN> summary;
    // Slopes of log(median) on log(log n / n).
    SlopeFit hausdorff_fit, boundary_fit, measure_fit;
    double theoretical_slope = 2.0 / 3.0;
    // Pairs of consecutive grid sizes whose median d_H rose by more than one
    // standard error of the difference.
    std::vector<std::pair<std::size_t, std::size_t>> monotone_violations;
    std::vector<RateRow> rows;
    std::vector<std::uint64_t> seeds;
};

// The n-grid must span at least 1.5 decades.
RateReport rate_study(const SyntheticModel& model, const RateConfig& config, const Progress& progress = {});

// ---- serialisation -------------------------------------------------------

nlohmann::json to_json(const SyntheticModel& model);
SyntheticModel model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SelectionConfig& config);
SelectionConfig selection_from_json(const nlohmann::json& j, SelectionConfig base = {});

nlohmann::json to_json(const LevelPowerReport& report);
nlohmann::json to_json(const ConsistencyReport& report);
nlohmann::json to_json(const RateReport& report);

std::string rows_csv(const LevelPowerReport& report);
std::string rows_csv(const ConsistencyReport& report);
std::string rows_csv(const RateReport& report);

LevelPowerConfig level_power_config_from_json(const nlohmann::json& j);
ConsistencyConfig consistency_config_from_json(const nlohmann::json& j);
RateConfig rate_config_from_json(const nlohmann::json& j);

}  // namespace rhull
