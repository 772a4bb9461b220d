// Acceptance suite. Prints one line per criterion and exits nonzero when a
// gating criterion fails. Usage:
//   rhull_acceptance [--cli PATH] [--data DIR] [--work DIR] [criterion ...]
// Criterion 10 runs only when RHULL_AZORES_CSV names an occurrence file.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rhull/hull_region.hpp"
#include "rhull/io.hpp"
#include "rhull/select.hpp"
#include "rhull/sim.hpp"
#include "rhull/spacing.hpp"
#include "rhull/synthetic.hpp"
#include "support/oracles.hpp"

using namespace rhull;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    enum { pass, fail, skip } status = fail;
    std::string detail;
};

struct Args {
    std::string cli;
    std::string data;
    std::string work = "acceptance_work";
};

std::string fmt(const char* f, auto... v) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, v...);
    return buf;
}

IndexPtr index_of(std::vector<Point> pts) { return build_index(PointSet(std::move(pts))); }

SyntheticModel annulus_model() {
    SyntheticModel m;
    m.support = SyntheticSupport::annulus({0, 0}, 0.35, 1.0);
    return m;
}

Progress progress_line(const std::string& label) {
    auto start = std::chrono::steady_clock::now();
    return [label, start](std::size_t done, std::size_t total) {
        if (done != total && done % 10 != 0) return;
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::fprintf(stderr, "  [%s] %zu/%zu replicates, %.0f s\n", label.c_str(), done, total, s);
    };
}

Outcome criterion1(const Args&) {
    const double b2 = beta_const(2);
    const double b3 = beta_const(3);
    const double want3 = 3 * std::numbers::pi * std::numbers::pi / 32;
    const bool ok = b2 == 1.0 && std::fabs(b3 - want3) <= 1e-12;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("beta(2) = %.17g, |beta(3) - 3 pi^2/32| = %.3g", b2, std::fabs(b3 - want3))};
}

Outcome criterion2(const Args&) {
    std::mt19937_64 rng(20261019);
    std::uniform_real_distribution<double> log_n(std::log(3.0), std::log(1e6));
    std::uniform_real_distribution<double> unit(0, 1);
    std::uniform_int_distribution<int> dim(1, 5);
    double worst = 0;
    for (int k = 0; k < 1000; ++k) {
        const auto n = static_cast<std::size_t>(std::llround(std::exp(log_n(rng))));
        // Mix the bulk with the tails of (0, 1).
        double alpha = unit(rng);
        if (k % 4 == 1) alpha = std::pow(10.0, -6 * unit(rng));
        if (k % 4 == 2) alpha = 1 - std::pow(10.0, -6 * unit(rng));
        alpha = std::clamp(alpha, 1e-6, 1 - 1e-6);
        const int d = dim(rng);
        const double v = critical_value(n, alpha, d);
        const double want = -std::log(-std::log1p(-alpha));
        worst = std::max(worst, std::fabs(u_statistic(v, n, d) - want));
    }
    return {worst <= 1e-10 ? Outcome::pass : Outcome::fail, fmt("max deviation %.3g over 1000 tuples (<= 1e-10)", worst)};
}

Outcome criterion3(const Args&) {
    std::size_t worst_mis = 0, worst_bound = 0;
    double worst_ratio = 0;
    bool ok = true;
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> size(10, 200);
    for (int s = 0; s < 20; ++s) {
        const auto pts = oracle::uniform_square(size(rng), 1000 + s);
        const auto idx = index_of(pts);
        for (double r : {0.1, 0.3, 0.5}) {
            const HullRegion h(idx, r);
            const auto raster = oracle::rasterized_hull(pts, r, 0.0, 1.0, 512);
            std::size_t mis = 0;
            for (std::size_t iy = 0; iy < raster.res; ++iy)
                for (std::size_t ix = 0; ix < raster.res; ++ix)
                    mis += h.contains(raster.center(ix, iy)) != raster.at(ix, iy);
            const std::size_t bound = oracle::raster_boundary_cells(raster);
            const double ratio = bound ? double(mis) / double(bound) : (mis ? kInf : 0.0);
            if (!(double(mis) < 4.0 * double(bound)) && mis > 0) ok = false;
            if (ratio >= worst_ratio) {
                worst_ratio = ratio;
                worst_mis = mis;
                worst_bound = bound;
            }
        }
    }
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("60 hulls; worst mismatch %zu cells vs %zu boundary cells (ratio %.3f < 4)", worst_mis, worst_bound,
                worst_ratio)};
}

Outcome criterion4(const Args&) {
    SyntheticModel model;  // unit disc, uniform
    LevelPowerConfig c;
    c.r_grid = {0.2, 0.5, 1, 2};
    c.alpha = 0.05;
    c.n = 1000;
    c.replicates = 200;
    c.seed = 4;
    const auto rep = level_power_study(model, c, progress_line("level"));
    double worst = 0;
    std::string rates;
    for (const auto& row : rep.summary) {
        worst = std::max(worst, row.rate);
        rates += fmt("%sr=%g: %.3f", rates.empty() ? "" : ", ", row.r, row.rate);
    }
    return {worst <= 0.10 ? Outcome::pass : Outcome::fail, "rejection rates " + rates + " (each <= 0.10)"};
}

Outcome criterion5(const Args&) {
    LevelPowerConfig c;
    c.r_grid = {5};
    c.alpha = 0.05;
    c.n = 2000;
    c.replicates = 100;
    c.seed = 5;
    const auto rep = level_power_study(annulus_model(), c, progress_line("power"));
    const double rate = rep.summary.front().rate;
    return {rate >= 0.95 ? Outcome::pass : Outcome::fail, fmt("rejection rate at r = 5: %.3f (>= 0.95)", rate)};
}

Outcome criterion6(const Args&) {
    ConsistencyConfig c;
    c.n_grid = {500, 2000};
    c.replicates = 100;
    c.seed = 6;
    c.selection.alpha = 0.01;
    c.selection.iterations = 20;
    c.selection.max_components = 4;
    const auto rep = consistency_study(annulus_model(), c, progress_line("consistency"));
    const auto& small = rep.summary[0];
    const auto& large = rep.summary[1];
    const double med = large.r_hat.median;
    const bool ok = large.finite > 0 && small.finite > 0 && med >= 0.25 && med <= 0.5 &&
                    large.r_hat.iqr < small.r_hat.iqr;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("median r_hat at n=2000: %.4f (in [0.25, 0.5]); IQR %.4f at n=500 -> %.4f at n=2000; fallbacks "
                "%zu/%zu",
                med, small.r_hat.iqr, large.r_hat.iqr, large.component_cap + large.convex_hull,
                small.component_cap + small.convex_hull)};
}

Outcome criterion7(const Args&) {
    RateConfig c;
    c.n_grid = {250, 500, 1000, 2000, 4000, 8000};
    c.replicates = 50;
    c.seed = 7;
    const auto rep = rate_study(annulus_model(), c, progress_line("rate"));
    const double h = rep.hausdorff_fit.slope, b = rep.boundary_fit.slope, m = rep.measure_fit.slope;
    const bool ok = h >= 0.45 && h <= 0.90 && b >= 0.35 && b <= 1.0 && m >= 0.35 && m <= 1.0;
    std::string note;
    for (const auto& [a, z] : rep.monotone_violations) note += fmt(" %zu->%zu", a, z);
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("slopes d_H %.3f (in [0.45, 0.90]), boundary %.3f, d_mu %.3f (in [0.35, 1.0]); monotone "
                "violations:%s",
                h, b, m, note.empty() ? " none" : note.c_str())};
}

Outcome criterion8(const Args&) {
    std::vector<std::vector<Point>> samples;
    const auto ann = annulus_model().support;
    for (std::uint64_t seed : {81, 82, 83, 84})
        samples.push_back(sample_points(ann, SyntheticDensity::uniform(ann), 600, seed));
    const auto islands = SyntheticSupport::union_of_discs({{{0, 0}, 1}, {{3.5, 0}, 0.6}});
    samples.push_back(sample_points(islands, SyntheticDensity::uniform(islands), 600, 85));

    SelectionConfig config;
    config.iterations = 20;
    std::size_t runs = 0, steps = 0;
    std::string problem;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto idx = index_of(samples[s]);
        const auto res = select_r0(idx, config);
        if (res.fallback != Fallback::none) continue;
        ++runs;
        // Fresh tester, so the re-tests do not share state with the selector.
        const RConvexityTester check(idx, config.alpha);
        const double w0 = res.endpoints.r_max - res.endpoints.r_min;
        if (check.test(res.endpoints.r_min).reject || !check.test(res.endpoints.r_max).reject)
            problem += fmt(" sample %zu: endpoints;", s);
        for (const auto& step : res.trace) {
            ++steps;
            if (check.test(step.low).reject || !check.test(step.high).reject) {
                problem += fmt(" sample %zu: bracket at r=%.17g;", s, step.r);
                break;
            }
        }
        if (res.final_high - res.final_low != std::ldexp(w0, -static_cast<int>(config.iterations)))
            problem += fmt(" sample %zu: width %.17g vs %.17g;", s, res.final_high - res.final_low,
                           std::ldexp(w0, -static_cast<int>(config.iterations)));
    }
    const bool ok = runs >= 3 && problem.empty();
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("%zu runs without fallback, %zu bracket steps re-tested; width exact", runs, steps) +
                (problem.empty() ? "" : " | problems:" + problem)};
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome criterion9(const Args& a) {
    if (a.cli.empty() || a.data.empty()) return {Outcome::fail, "needs --cli and --data"};
    const fs::path work = fs::absolute(fs::path(a.work) / "determinism");
    fs::remove_all(work);
    fs::create_directories(work);
    const fs::path input = fs::path(a.data) / "two_islands.csv";
    std::vector<std::string> geo, man;
    for (int run = 0; run < 2; ++run) {
        const std::string cmd = "\"" + a.cli + "\" estimate \"" + input.string() + "\" --seed 9 --out-geojson \"" +
                                (work / "eoo.geojson").string() + "\" --out-manifest \"" +
                                (work / "manifest.json").string() + "\" > \"" + (work / "stdout.txt").string() +
                                "\" 2>&1";
        if (std::system(cmd.c_str()) != 0) return {Outcome::fail, "estimate exited nonzero: " + file_bytes(work / "stdout.txt")};
        geo.push_back(file_bytes(work / "eoo.geojson"));
        man.push_back(file_bytes(work / "manifest.json"));
        fs::remove(work / "eoo.geojson");
        fs::remove(work / "manifest.json");
    }
    const bool ok = !geo[0].empty() && !man[0].empty() && geo[0] == geo[1] && man[0] == man[1];
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("GeoJSON %zu bytes %s, manifest %zu bytes %s", geo[0].size(), geo[0] == geo[1] ? "identical" : "DIFFER",
                man[0].size(), man[0] == man[1] ? "identical" : "DIFFER")};
}

Outcome criterion10(const Args&) {
    const char* path = std::getenv("RHULL_AZORES_CSV");
    if (!path || !*path) return {Outcome::skip, "set RHULL_AZORES_CSV to an occurrence file to run"};
    const auto table = ingest_file(path);
    SelectionConfig config;
    config.alpha = 0.01;
    config.max_components = 4;
    const auto est = estimate_support(index_of(table.points()), config);
    const double r = est.selection.r_hat;
    const bool ok = est.components == 2 && r >= 0.06 && r <= 0.25;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("%zu points; r_hat %.4f (in [0.06, 0.25]), %zu components (want 2)", table.rows.size(), r,
                est.components)};
}

}  // namespace

int main(int argc, char** argv) {
    Args args;
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if ((a == "--cli" || a == "--data" || a == "--work") && i + 1 < argc) {
            (a == "--cli" ? args.cli : a == "--data" ? args.data : args.work) = argv[++i];
        } else {
            char* end = nullptr;
            const long k = std::strtol(a.c_str(), &end, 10);
            if (*end != '\0' || k < 1 || k > 10) {
                std::cerr << "usage: rhull_acceptance [--cli PATH] [--data DIR] [--work DIR] [criterion 1-10 ...]\n";
                return 2;
            }
            wanted.insert(static_cast<int>(k));
        }
    }

    const std::vector<std::pair<const char*, std::function<Outcome(const Args&)>>> criteria = {
        {"closed-form constants", criterion1}, {"critical-value identity", criterion2},
        {"hull oracle", criterion3},           {"level control", criterion4},
        {"power", criterion5},                 {"selector consistency", criterion6},
        {"convergence rate", criterion7},      {"bisection contract", criterion8},
        {"determinism", criterion9},           {"Azores case (optional)", criterion10},
    };

    bool failed = false;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int number = static_cast<int>(k) + 1;
        if (!wanted.empty() && !wanted.count(number)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[k].second(args);
        } catch (const std::exception& e) {
            out = {Outcome::fail, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const char* status = out.status == Outcome::pass ? "PASS" : out.status == Outcome::skip ? "SKIP" : "FAIL";
        std::printf("criterion %d (%s): %s: %s [%.1f s]\n", number, criteria[k].first, status, out.detail.c_str(),
                    secs);
        std::fflush(stdout);
        if (out.status == Outcome::fail && number != 10) failed = true;
    }
    return failed ? 1 : 0;
}
