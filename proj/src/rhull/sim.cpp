#include "rhull/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>

#include "rhull/metrics.hpp"
#include "rhull/parallel.hpp"

namespace rhull {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double quantile(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

class ProgressCounter {
public:
    ProgressCounter(const Progress& fn, std::size_t total) : fn_(fn), total_(total) {}
    void tick() {
        if (!fn_) return;
        std::lock_guard lock(mutex_);
        fn_(++done_, total_);
    }

private:
    const Progress& fn_;
    std::size_t total_;
    std::size_t done_ = 0;
    std::mutex mutex_;
};

IndexPtr draw(const SyntheticModel& model, std::size_t n, std::uint64_t seed) {
    return build_index(PointSet(sample_points(model.support, model.density(), n, seed)));
}

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::invalid_argument, what);
}

json quantiles_json(const QuantileSummary& q) {
    return {{"median", num(q.median)}, {"q25", num(q.q25)}, {"q75", num(q.q75)}, {"iqr", num(q.iqr)},
            {"min", num(q.min)},       {"max", num(q.max)}, {"median_se", num(q.median_se)}};
}

json fit_json(const SlopeFit& f) {
    return {{"slope", num(f.slope)}, {"intercept", num(f.intercept)}, {"standard_error", num(f.standard_error)}};
}

json test_options_json(const TestOptions& t) {
    return {{"h0", t.h0}, {"bandwidth", t.bandwidth}, {"angular_samples", t.angular_samples}, {"exhaustive", t.exhaustive}};
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

template <class Fn>
auto parse_guard(Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("invalid simulation config: ") + e.what());
    }
}

Point point_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t cell, std::size_t replicates, std::size_t k) {
    return derive_seed(seed, cell * replicates + k);
}

QuantileSummary summarize(std::vector<double> values) {
    QuantileSummary q;
    if (values.empty()) {
        q.median = q.q25 = q.q75 = q.iqr = q.min = q.max = q.median_se = std::nan("");
        return q;
    }
    std::sort(values.begin(), values.end());
    q.median = quantile(values, 0.5);
    q.q25 = quantile(values, 0.25);
    q.q75 = quantile(values, 0.75);
    q.iqr = q.q75 - q.q25;
    q.min = values.front();
    q.max = values.back();
    const double m = static_cast<double>(values.size());
    const double half = 1.96 * std::sqrt(m) / 2;
    const auto lo = static_cast<std::size_t>(std::clamp(std::floor(m / 2 - half), 0.0, m - 1));
    const auto hi = static_cast<std::size_t>(std::clamp(std::ceil(m / 2 + half), 0.0, m - 1));
    q.median_se = (values[hi] - values[lo]) / (2 * 1.96);
    return q;
}

SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 3, "line fit needs at least three points");
    const double m = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - f.intercept - f.slope * x[i];
        ssr += e * e;
    }
    f.standard_error = std::sqrt(ssr / (m - 2) / sxx);
    return f;
}

LevelPowerReport level_power_study(const SyntheticModel& model, const LevelPowerConfig& config,
                                   const Progress& progress) {
    require(config.replicates >= 50, "level/power studies need at least 50 replicates");
    require(!config.r_grid.empty(), "r-grid is empty");
    for (double r : config.r_grid) require(r > 0, "grid radii must be positive");
    require(config.alpha > 0 && config.alpha < 1, "alpha must lie in (0, 1)");

    LevelPowerReport rep;
    rep.model = model;
    rep.config = config;
    const std::size_t R = config.replicates, G = config.r_grid.size();
    rep.seeds.resize(R);
    for (std::size_t k = 0; k < R; ++k) rep.seeds[k] = replicate_seed(config.seed, 0, R, k);
    rep.rows.resize(R * G);

    ProgressCounter counter(progress, R);
    parallel_for(R, [&](std::size_t k) {
        const RConvexityTester tester(draw(model, config.n, rep.seeds[k]), config.alpha, config.test);
        for (std::size_t g = 0; g < G; ++g) {
            const TestResult res = tester.test(config.r_grid[g]);
            rep.rows[k * G + g] = {k, rep.seeds[k], config.r_grid[g], res.reject, res.components};
        }
        counter.tick();
    });

    for (std::size_t g = 0; g < G; ++g) {
        RejectionRate rate;
        rate.r = config.r_grid[g];
        for (std::size_t k = 0; k < R; ++k) rate.rejections += rep.rows[k * G + g].reject;
        rate.rate = static_cast<double>(rate.rejections) / static_cast<double>(R);
        rate.standard_error = std::sqrt(rate.rate * (1 - rate.rate) / static_cast<double>(R));
        rep.summary.push_back(rate);
    }
    return rep;
}

ConsistencyReport consistency_study(const SyntheticModel& model, const ConsistencyConfig& config,
                                    const Progress& progress) {
    require(!config.n_grid.empty(), "n-grid is empty");
    require(config.replicates >= 1, "at least one replicate is needed");
    for (std::size_t n : config.n_grid) require(n >= 3, "sample sizes must be at least 3");
    config.selection.validate();

    ConsistencyReport rep;
    rep.model = model;
    rep.config = config;
    const std::size_t R = config.replicates, N = config.n_grid.size();
    rep.seeds.resize(N * R);
    rep.rows.resize(N * R);
    for (std::size_t j = 0; j < N; ++j)
        for (std::size_t k = 0; k < R; ++k) rep.seeds[j * R + k] = replicate_seed(config.seed, j, R, k);

    ProgressCounter counter(progress, N * R);
    parallel_for(N * R, [&](std::size_t task) {
        const std::size_t j = task / R, k = task % R;
        const SupportEstimate est = estimate_support(draw(model, config.n_grid[j], rep.seeds[task]), config.selection);
        rep.rows[task] = {config.n_grid[j], k, rep.seeds[task], est.selection.r_hat, est.selection.fallback, est.components};
        counter.tick();
    });

    const auto r0 = model.support.r0();
    for (std::size_t j = 0; j < N; ++j) {
        ConsistencyAtN s;
        s.n = config.n_grid[j];
        std::vector<double> finite;
        for (std::size_t k = 0; k < R; ++k) {
            const auto& row = rep.rows[j * R + k];
            s.component_cap += row.fallback == Fallback::component_cap;
            s.convex_hull += row.fallback == Fallback::convex_hull;
            if (std::isfinite(row.r_hat)) finite.push_back(row.r_hat);
        }
        s.finite = finite.size();
        s.r_hat = summarize(finite);
        if (r0 && std::isfinite(*r0) && !finite.empty()) s.median_bias = s.r_hat.median - *r0;
        rep.summary.push_back(s);
    }
    return rep;
}

RateReport rate_study(const SyntheticModel& model, const RateConfig& config, const Progress& progress) {
    require(config.n_grid.size() >= 3, "rate studies need at least three sample sizes");
    const auto [nmin, nmax] = std::minmax_element(config.n_grid.begin(), config.n_grid.end());
    require(*nmin >= 3, "sample sizes must be at least 3");
    require(std::log10(static_cast<double>(*nmax) / static_cast<double>(*nmin)) >= 1.5 - 1e-12,
            "the n-grid must span at least 1.5 decades");
    require(config.replicates >= 1, "at least one replicate is needed");
    require(config.measure_samples >= 1, "measure samples must be positive");
    config.selection.validate();

    RateReport rep;
    rep.model = model;
    rep.config = config;
    const std::size_t R = config.replicates, N = config.n_grid.size();
    rep.seeds.resize(N * R);
    rep.rows.resize(N * R);
    for (std::size_t j = 0; j < N; ++j)
        for (std::size_t k = 0; k < R; ++k) rep.seeds[j * R + k] = replicate_seed(config.seed, j, R, k);

    ProgressCounter counter(progress, N * R);
    parallel_for(N * R, [&](std::size_t task) {
        const std::size_t j = task / R, k = task % R;
        const SupportEstimate est = estimate_support(draw(model, config.n_grid[j], rep.seeds[task]), config.selection);
        const HullRegion& region = *est.region;
        RateRow row;
        row.n = config.n_grid[j];
        row.replicate = k;
        row.seed = rep.seeds[task];
        row.r_hat = est.selection.r_hat;
        row.radius = est.radius;
        row.fallback = est.selection.fallback;
        row.hausdorff = hausdorff(model.support, region, config.metric_step).value;
        row.boundary_hausdorff = boundary_hausdorff(model.support, region, config.metric_step).value;
        row.measure =
            distance_in_measure(model.support, region, config.measure_samples, derive_seed(row.seed, 1)).value;
        rep.rows[task] = row;
        counter.tick();
    });

    std::vector<double> x, yh, yb, ym;
    for (std::size_t j = 0; j < N; ++j) {
        std::vector<double> h, b, m;
        for (std::size_t k = 0; k < R; ++k) {
            const auto& row = rep.rows[j * R + k];
            h.push_back(row.hausdorff);
            b.push_back(row.boundary_hausdorff);
            m.push_back(row.measure);
        }
        RateAtN s{config.n_grid[j], summarize(h), summarize(b), summarize(m)};
        rep.summary.push_back(s);
        const double n = static_cast<double>(config.n_grid[j]);
        x.push_back(std::log(std::log(n) / n));
        yh.push_back(std::log(s.hausdorff.median));
        yb.push_back(std::log(s.boundary_hausdorff.median));
        ym.push_back(std::log(s.measure.median));
    }
    rep.hausdorff_fit = fit_line(x, yh);
    rep.boundary_fit = fit_line(x, yb);
    rep.measure_fit = fit_line(x, ym);

    std::vector<std::size_t> order(N);
    for (std::size_t j = 0; j < N; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return config.n_grid[a] < config.n_grid[b]; });
    for (std::size_t i = 1; i < N; ++i) {
        const auto& a = rep.summary[order[i - 1]].hausdorff;
        const auto& b = rep.summary[order[i]].hausdorff;
        const double se = std::hypot(a.median_se, b.median_se);
        if (b.median > a.median + se)
            rep.monotone_violations.emplace_back(config.n_grid[order[i - 1]], config.n_grid[order[i]]);
    }
    return rep;
}

// ---- serialisation -------------------------------------------------------

json to_json(const SyntheticModel& model) {
    const SyntheticSupport& s = model.support;
    json sj;
    auto pt = [](Point p) { return json::array({p.x, p.y}); };
    switch (s.kind()) {
        case SyntheticSupport::Kind::disc:
            sj = {{"shape", "disc"}, {"center", pt(s.discs()[0].center)}, {"radius", s.discs()[0].radius}};
            break;
        case SyntheticSupport::Kind::annulus:
            sj = {{"shape", "annulus"}, {"center", pt(s.discs()[0].center)}, {"inner", s.inner_radius()}, {"outer", s.discs()[0].radius}};
            break;
        case SyntheticSupport::Kind::discs: {
            json arr = json::array();
            for (const auto& d : s.discs()) arr.push_back({{"center", pt(d.center)}, {"radius", d.radius}});
            sj = {{"shape", "discs"}, {"discs", arr}};
            break;
        }
        case SyntheticSupport::Kind::rectangle:
            sj = {{"shape", "rectangle"}, {"lo", pt(s.rectangle_box().lo)}, {"hi", pt(s.rectangle_box().hi)}};
            break;
    }
    sj["area"] = s.area();
    sj["r0"] = s.r0() ? num(*s.r0()) : json(nullptr);
    json dj = model.slope == 0 ? json{{"kind", "uniform"}} : json{{"kind", "ramp"}, {"slope", model.slope}};
    return {{"support", sj}, {"density", dj}};
}

SyntheticModel model_from_json(const json& j) {
    return parse_guard([&] {
        const json& s = j.at("support");
        const std::string shape = s.at("shape").get<std::string>();
        SyntheticModel m;
        if (shape == "disc") {
            m.support = SyntheticSupport::disc(point_from_json(s.at("center")), s.at("radius").get<double>());
        } else if (shape == "annulus") {
            m.support = SyntheticSupport::annulus(point_from_json(s.at("center")), s.at("inner").get<double>(),
                                                  s.at("outer").get<double>());
        } else if (shape == "discs") {
            std::vector<Disc> discs;
            for (const auto& d : s.at("discs")) discs.push_back({point_from_json(d.at("center")), d.at("radius").get<double>()});
            m.support = SyntheticSupport::union_of_discs(std::move(discs));
        } else if (shape == "rectangle") {
            m.support = SyntheticSupport::rectangle(point_from_json(s.at("lo")), point_from_json(s.at("hi")));
        } else {
            throw Error(ErrorCode::parse_error, "unknown support shape '" + shape + "'");
        }
        if (j.contains("density")) {
            const json& d = j.at("density");
            const std::string kind = get_or<std::string>(d, "kind", "uniform");
            if (kind == "ramp") m.slope = d.at("slope").get<double>();
            else if (kind != "uniform") throw Error(ErrorCode::parse_error, "unknown density kind '" + kind + "'");
        }
        m.density();  // validates the slope
        return m;
    });
}

json to_json(const SelectionConfig& c) {
    return {{"alpha", c.alpha},
            {"iterations", c.iterations},
            {"max_components", c.max_components},
            {"r_min", c.r_min},
            {"r_max", c.r_max},
            {"nu", c.nu},
            {"h0", c.h0},
            {"bandwidth", c.bandwidth},
            {"angular_samples", c.angular_samples},
            {"escalation_limit", c.escalation_limit},
            {"seed", c.seed}};
}

SelectionConfig selection_from_json(const json& j, SelectionConfig c) {
    return parse_guard([&] {
        c.alpha = get_or(j, "alpha", c.alpha);
        c.iterations = get_or(j, "iterations", c.iterations);
        c.max_components = get_or(j, "max_components", c.max_components);
        c.r_min = get_or(j, "r_min", c.r_min);
        c.r_max = get_or(j, "r_max", c.r_max);
        c.nu = get_or(j, "nu", c.nu);
        c.h0 = get_or(j, "h0", c.h0);
        c.bandwidth = get_or(j, "bandwidth", c.bandwidth);
        c.angular_samples = get_or(j, "angular_samples", c.angular_samples);
        c.escalation_limit = get_or(j, "escalation_limit", c.escalation_limit);
        c.seed = get_or(j, "seed", c.seed);
        return c;
    });
}

json to_json(const LevelPowerReport& r) {
    json summary = json::array();
    for (const auto& s : r.summary)
        summary.push_back({{"r", s.r}, {"rejections", s.rejections}, {"rate", s.rate}, {"standard_error", s.standard_error}});
    return {{"study", "level-power"},
            {"model", to_json(r.model)},
            {"config",
             {{"r_grid", r.config.r_grid},
              {"alpha", r.config.alpha},
              {"n", r.config.n},
              {"replicates", r.config.replicates},
              {"seed", r.config.seed},
              {"test", test_options_json(r.config.test)}}},
            {"summary", summary},
            {"seeds", r.seeds}};
}

json to_json(const ConsistencyReport& r) {
    json summary = json::array();
    for (const auto& s : r.summary) {
        summary.push_back({{"n", s.n},
                           {"r_hat", quantiles_json(s.r_hat)},
                           {"finite", s.finite},
                           {"component_cap", s.component_cap},
                           {"convex_hull", s.convex_hull},
                           {"median_bias", s.median_bias ? num(*s.median_bias) : json(nullptr)}});
    }
    return {{"study", "consistency"},
            {"model", to_json(r.model)},
            {"config",
             {{"n_grid", r.config.n_grid},
              {"replicates", r.config.replicates},
              {"seed", r.config.seed},
              {"selection", to_json(r.config.selection)}}},
            {"summary", summary},
            {"seeds", r.seeds}};
}

json to_json(const RateReport& r) {
    json summary = json::array();
    for (const auto& s : r.summary) {
        summary.push_back({{"n", s.n},
                           {"hausdorff", quantiles_json(s.hausdorff)},
                           {"boundary_hausdorff", quantiles_json(s.boundary_hausdorff)},
                           {"measure", quantiles_json(s.measure)}});
    }
    json violations = json::array();
    for (const auto& [a, b] : r.monotone_violations) violations.push_back({a, b});
    return {{"study", "rate"},
            {"model", to_json(r.model)},
            {"config",
             {{"n_grid", r.config.n_grid},
              {"replicates", r.config.replicates},
              {"seed", r.config.seed},
              {"selection", to_json(r.config.selection)},
              {"metric_step", r.config.metric_step},
              {"measure_samples", r.config.measure_samples}}},
            {"summary", summary},
            {"fits",
             {{"regressor", "log(log n / n)"},
              {"hausdorff", fit_json(r.hausdorff_fit)},
              {"boundary_hausdorff", fit_json(r.boundary_fit)},
              {"measure", fit_json(r.measure_fit)},
              {"theoretical_slope", r.theoretical_slope}}},
            {"monotone_violations", violations},
            {"seeds", r.seeds}};
}

namespace {

std::string fmt(double v) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : "nan";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::string rows_csv(const LevelPowerReport& r) {
    std::ostringstream os;
    os << "replicate,seed,r,reject,components\n";
    for (const auto& row : r.rows)
        os << row.replicate << ',' << row.seed << ',' << fmt(row.r) << ',' << (row.reject ? 1 : 0) << ','
           << row.components << '\n';
    return os.str();
}

std::string rows_csv(const ConsistencyReport& r) {
    std::ostringstream os;
    os << "n,replicate,seed,r_hat,fallback,components\n";
    for (const auto& row : r.rows)
        os << row.n << ',' << row.replicate << ',' << row.seed << ',' << fmt(row.r_hat) << ','
           << fallback_name(row.fallback) << ',' << row.components << '\n';
    return os.str();
}

std::string rows_csv(const RateReport& r) {
    std::ostringstream os;
    os << "n,replicate,seed,r_hat,radius,fallback,hausdorff,boundary_hausdorff,measure\n";
    for (const auto& row : r.rows)
        os << row.n << ',' << row.replicate << ',' << row.seed << ',' << fmt(row.r_hat) << ',' << fmt(row.radius) << ','
           << fallback_name(row.fallback) << ',' << fmt(row.hausdorff) << ',' << fmt(row.boundary_hausdorff) << ','
           << fmt(row.measure) << '\n';
    return os.str();
}

LevelPowerConfig level_power_config_from_json(const json& j) {
    return parse_guard([&] {
        LevelPowerConfig c;
        c.r_grid = j.at("r_grid").get<std::vector<double>>();
        c.alpha = get_or(j, "alpha", c.alpha);
        c.n = get_or(j, "n", c.n);
        c.replicates = get_or(j, "replicates", c.replicates);
        c.seed = get_or(j, "seed", c.seed);
        if (j.contains("test")) {
            const json& t = j.at("test");
            c.test.h0 = get_or(t, "h0", c.test.h0);
            c.test.bandwidth = get_or(t, "bandwidth", c.test.bandwidth);
            c.test.angular_samples = get_or(t, "angular_samples", c.test.angular_samples);
            c.test.exhaustive = get_or(t, "exhaustive", c.test.exhaustive);
        }
        return c;
    });
}

ConsistencyConfig consistency_config_from_json(const json& j) {
    return parse_guard([&] {
        ConsistencyConfig c;
        c.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
        c.replicates = get_or(j, "replicates", c.replicates);
        c.seed = get_or(j, "seed", c.seed);
        if (j.contains("selection")) c.selection = selection_from_json(j.at("selection"));
        return c;
    });
}

RateConfig rate_config_from_json(const json& j) {
    return parse_guard([&] {
        RateConfig c;
        c.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
        c.replicates = get_or(j, "replicates", c.replicates);
        c.seed = get_or(j, "seed", c.seed);
        if (j.contains("selection")) c.selection = selection_from_json(j.at("selection"));
        c.metric_step = get_or(j, "metric_step", c.metric_step);
        c.measure_samples = get_or(j, "measure_samples", c.measure_samples);
        return c;
    });
}

}  // namespace rhull
