#include "rhull/rhull.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <initializer_list>
#include <memory>
#include <new>
#include <string>

#include "rhull/io.hpp"
#include "rhull/select.hpp"
#include "rhull/sim.hpp"

using nlohmann::json;
using namespace rhull;

struct rhull_points {
    IndexPtr index;
    double x_factor = 1;
};

struct rhull_region {
    std::shared_ptr<const HullRegion> region;
    double x_factor = 1;
};

namespace {

thread_local std::string last_error;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

rhull_status fail(rhull_status status, const std::string& message) {
    last_error = message;
    return status;
}

// Runs fn, mapping exceptions onto status codes.
template <class Fn>
rhull_status guarded(Fn&& fn) {
    try {
        last_error.clear();
        fn();
        return RHULL_OK;
    } catch (const Error& e) {
        return fail(static_cast<rhull_status>(static_cast<int>(e.code())), e.what());
    } catch (const json::exception& e) {
        return fail(RHULL_PARSE_ERROR, e.what());
    } catch (const std::bad_alloc&) {
        return fail(RHULL_INTERNAL_ERROR, "out of memory");
    } catch (const std::exception& e) {
        return fail(RHULL_INTERNAL_ERROR, e.what());
    } catch (...) {
        return fail(RHULL_INTERNAL_ERROR, "unknown failure");
    }
}

json parse_options(const char* text) {
    if (!text || !*text) return json::object();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::parse_error, std::string("options: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::parse_error, "options must be a JSON object");
    return j;
}

void only_keys(const json& j, std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* k : keys) known |= key == k;
        if (!known) throw Error(ErrorCode::parse_error, "unknown option '" + key + "'");
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::invalid_argument, what);
}

json witness_json(const std::optional<Witness>& w) {
    if (!w) return nullptr;
    return {{"center", {w->center.x, w->center.y}},
            {"radius", num(w->radius)},
            {"sample", w->sample},
            {"boundary_distance", num(w->boundary_distance)}};
}

json test_json(const TestResult& t) {
    json j = {{"decision", t.reject ? "REJECT" : "FAIL TO REJECT"},
              {"reject", t.reject},
              {"r", num(t.r)},
              {"alpha", t.alpha},
              {"n", t.n},
              {"d", t.d},
              {"critical_value", num(t.c_crit)},
              {"bandwidth", num(t.bandwidth)},
              {"m", num(t.m)},
              {"extreme_count", t.extreme_count},
              {"angular_samples", t.angular_samples},
              {"exhaustive", t.exhaustive},
              {"components", t.components},
              {"witness", witness_json(t.witness)}};
    if (t.candidate_count) j["candidate_count"] = *t.candidate_count;
    if (t.max_boundary_distance) j["max_boundary_distance"] = num(*t.max_boundary_distance);
    if (t.max_margin) j["max_margin"] = num(*t.max_margin);
    return j;
}

json step_json(const TraceStep& s) {
    return {{"r", num(s.r)},
            {"reject", s.reject},
            {"components", s.components},
            {"witness", witness_json(s.witness)},
            {"low", num(s.low)},
            {"high", num(s.high)}};
}

json estimate_json(const SupportEstimate& e) {
    const SelectionResult& s = e.selection;
    json checks = json::array(), trace = json::array();
    for (const auto& c : s.endpoints.checks) checks.push_back(step_json(c));
    for (const auto& c : s.trace) trace.push_back(step_json(c));
    return {{"r_hat", num(s.r_hat)},
            {"radius", num(e.radius)},
            {"fallback", fallback_name(s.fallback)},
            {"components", e.components},
            {"area", e.area},
            {"sample_hash", hex64(e.sample_hash)},
            {"critical_value", num(s.c_crit)},
            {"bandwidth", num(s.bandwidth)},
            {"m", num(s.m)},
            {"extreme_count", s.extreme_count},
            {"endpoints",
             {{"r_min", num(s.endpoints.r_min)},
              {"r_max", num(s.endpoints.r_max)},
              {"r_components", num(s.endpoints.r_components)},
              {"directive", fallback_name(s.endpoints.directive)},
              {"checks", checks}}},
            {"trace", trace},
            {"final_bracket", {num(s.final_low), num(s.final_high)}},
            {"config", to_json(e.config)}};
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

extern "C" {

const char* rhull_version(void) { return RHULL_VERSION; }

const char* rhull_status_name(rhull_status status) {
    switch (status) {
        case RHULL_OK: return "Ok";
        case RHULL_INTERNAL_ERROR: return "InternalError";
        default:
            if (status >= RHULL_INVALID_ARGUMENT && status <= RHULL_IO_ERROR)
                return error_code_name(static_cast<ErrorCode>(static_cast<int>(status)));
            return "Unknown";
    }
}

const char* rhull_last_error(void) { return last_error.c_str(); }

void rhull_string_free(char* s) { std::free(s); }

rhull_status rhull_points_create(const double* xy, size_t n, rhull_points** out) {
    return guarded([&] {
        require(out != nullptr, "output handle is null");
        *out = nullptr;
        require(xy != nullptr || n == 0, "coordinate array is null");
        std::vector<Point> pts(n);
        for (size_t i = 0; i < n; ++i) pts[i] = {xy[2 * i], xy[2 * i + 1]};
        auto p = std::make_unique<rhull_points>();
        p->index = build_index(PointSet(std::move(pts)));
        *out = p.release();
    });
}

rhull_status rhull_points_read(const char* path, const char* options_json, rhull_points** out, char** report_json) {
    return guarded([&] {
        require(out != nullptr, "output handle is null");
        *out = nullptr;
        if (report_json) *report_json = nullptr;
        require(path != nullptr, "path is null");
        const json o = parse_options(options_json);
        only_keys(o, {"format", "date_from", "date_to", "species", "equirectangular"});
        InputFormat format = InputFormat::automatic;
        const std::string f = get_or<std::string>(o, "format", "auto");
        if (f == "csv") format = InputFormat::csv;
        else if (f == "geojson") format = InputFormat::geojson;
        else if (f != "auto") throw Error(ErrorCode::invalid_argument, "unknown format '" + f + "'");
        IngestOptions ingest;
        if (o.contains("date_from")) ingest.date_from = o["date_from"].get<std::string>();
        if (o.contains("date_to")) ingest.date_to = o["date_to"].get<std::string>();
        if (o.contains("species")) ingest.species = o["species"].get<std::string>();

        const std::string hash = sha256_file(path);
        const OccurrenceTable table = ingest_file(path, format, ingest);
        std::vector<Point> pts = table.points();
        PlanarScaling scaling;
        if (get_or(o, "equirectangular", false)) {
            scaling = equirectangular_scaling(pts);
            for (auto& p : pts) p.x *= scaling.x_factor;
        }
        auto p = std::make_unique<rhull_points>();
        p->index = build_index(PointSet(std::move(pts)));
        p->x_factor = scaling.x_factor;

        if (report_json) {
            json diags = json::array();
            for (const auto& d : table.diagnostics) diags.push_back({{"line", d.line}, {"message", d.message}});
            json report = {{"rows", table.rows.size()},
                           {"diagnostics", diags},
                           {"warnings", table.warnings},
                           {"duplicates_removed", table.duplicates_removed},
                           {"x_column", table.x_column},
                           {"y_column", table.y_column},
                           {"input_sha256", hash},
                           {"sample_hash", hex64(p->index->points().hash())},
                           {"x_factor", scaling.x_factor}};
            if (!table.delimiter.empty()) report["delimiter"] = table.delimiter;
            if (scaling.x_factor != 1) report["reference_latitude"] = scaling.reference_latitude;
            *report_json = dup_string(report.dump());
        }
        *out = p.release();
    });
}

size_t rhull_points_count(const rhull_points* points) { return points ? points->index->size() : 0; }

rhull_status rhull_points_get(const rhull_points* points, size_t i, double* x, double* y) {
    return guarded([&] {
        require(points && x && y, "null argument");
        require(i < points->index->size(), "index out of range");
        const Point p = points->index->point(i);
        *x = p.x;
        *y = p.y;
    });
}

uint64_t rhull_points_hash(const rhull_points* points) { return points ? points->index->points().hash() : 0; }

void rhull_points_free(rhull_points* points) { delete points; }

rhull_status rhull_hull_create(const rhull_points* points, double r, rhull_region** out) {
    return guarded([&] {
        require(out != nullptr, "output handle is null");
        *out = nullptr;
        require(points != nullptr, "points handle is null");
        require(r > 0, "r must be positive");
        auto reg = std::make_unique<rhull_region>();
        reg->region = std::make_shared<const HullRegion>(points->index, r);
        reg->x_factor = points->x_factor;
        *out = reg.release();
    });
}

rhull_status rhull_region_summary(const rhull_region* region, char** out) {
    return guarded([&] {
        require(region && out, "null argument");
        *out = nullptr;
        const HullRegion& h = *region->region;
        const json j = {{"radius", num(h.radius())},
                        {"area", h.area() / region->x_factor},
                        {"components", h.component_count()},
                        {"boundary_length", h.boundary_length()},
                        {"isolated_points", h.isolated_points().size()},
                        {"loops", h.loops().size()}};
        *out = dup_string(j.dump());
    });
}

rhull_status rhull_region_contains(const rhull_region* region, double x, double y, int* inside) {
    return guarded([&] {
        require(region && inside, "null argument");
        *inside = region->region->contains({x * region->x_factor, y}) ? 1 : 0;
    });
}

rhull_status rhull_region_geojson(const rhull_region* region, const char* options_json, char** out) {
    return guarded([&] {
        require(region && out, "null argument");
        *out = nullptr;
        const json o = parse_options(options_json);
        only_keys(o, {"chord_tolerance", "properties"});
        ExportOptions opt;
        opt.chord_tolerance = get_or(o, "chord_tolerance", 0.0);
        require(opt.chord_tolerance >= 0, "chord_tolerance must be non-negative");
        opt.x_factor = region->x_factor;
        if (o.contains("properties")) {
            require(o["properties"].is_object(), "properties must be an object");
            opt.properties = o["properties"];
        }
        *out = dup_string(region_geojson(*region->region, opt).dump());
    });
}

rhull_status rhull_region_svg(const rhull_region* region, const char* options_json, char** out) {
    return guarded([&] {
        require(region && out, "null argument");
        *out = nullptr;
        const json o = parse_options(options_json);
        only_keys(o, {"chord_tolerance", "title"});
        SvgOptions opt;
        opt.chord_tolerance = get_or(o, "chord_tolerance", 0.0);
        require(opt.chord_tolerance >= 0, "chord_tolerance must be non-negative");
        opt.title = get_or<std::string>(o, "title", "");
        opt.x_factor = region->x_factor;
        *out = dup_string(region_svg(*region->region, opt));
    });
}

void rhull_region_free(rhull_region* region) { delete region; }

rhull_status rhull_test(const rhull_points* points, double r, double alpha, const char* options_json,
                        char** result_json) {
    return guarded([&] {
        require(points && result_json, "null argument");
        *result_json = nullptr;
        const json o = parse_options(options_json);
        only_keys(o, {"h0", "bandwidth", "angular_samples", "exhaustive"});
        TestOptions t;
        t.h0 = get_or(o, "h0", t.h0);
        t.bandwidth = get_or(o, "bandwidth", t.bandwidth);
        t.angular_samples = get_or(o, "angular_samples", t.angular_samples);
        t.exhaustive = get_or(o, "exhaustive", t.exhaustive);
        json j = test_json(test_r_convexity(points->index, r, alpha, t));
        if (j["witness"].is_object() && points->x_factor != 1) {
            j["witness"]["center"][0] = j["witness"]["center"][0].get<double>() / points->x_factor;
            j["witness"]["scaled"] = true;
        }
        *result_json = dup_string(j.dump());
    });
}

rhull_status rhull_estimate(const rhull_points* points, const char* config_json, rhull_region** region,
                            char** result_json) {
    return guarded([&] {
        require(points != nullptr, "points handle is null");
        if (region) *region = nullptr;
        if (result_json) *result_json = nullptr;
        const json o = parse_options(config_json);
        only_keys(o, {"alpha", "iterations", "max_components", "r_min", "r_max", "nu", "h0", "bandwidth",
                      "angular_samples", "escalation_limit", "seed"});
        const SelectionConfig config = selection_from_json(o);
        const SupportEstimate est = estimate_support(points->index, config);
        json j = estimate_json(est);
        j["area"] = est.area / points->x_factor;
        if (result_json) *result_json = dup_string(j.dump());
        if (region) {
            auto reg = std::make_unique<rhull_region>();
            reg->region = std::static_pointer_cast<const HullRegion>(est.region);
            reg->x_factor = points->x_factor;
            *region = reg.release();
        }
    });
}

rhull_status rhull_simulate(const char* study, const char* config_json, rhull_progress_fn progress, void* user,
                            char** report_json, char** rows_csv_out) {
    return guarded([&] {
        require(study && report_json, "null argument");
        *report_json = nullptr;
        if (rows_csv_out) *rows_csv_out = nullptr;
        json o = parse_options(config_json);
        SyntheticModel model;
        if (o.contains("model")) model = model_from_json(o["model"]);
        o.erase("model");
        Progress cb;
        if (progress) cb = [progress, user](std::size_t done, std::size_t total) { progress(done, total, user); };
        const std::string s = study;
        std::string report, csv;
        if (s == "level-power") {
            const auto r = level_power_study(model, level_power_config_from_json(o), cb);
            report = to_json(r).dump();
            csv = rows_csv(r);
        } else if (s == "consistency") {
            const auto r = consistency_study(model, consistency_config_from_json(o), cb);
            report = to_json(r).dump();
            csv = rows_csv(r);
        } else if (s == "rate") {
            const auto r = rate_study(model, rate_config_from_json(o), cb);
            report = to_json(r).dump();
            csv = rows_csv(r);
        } else {
            throw Error(ErrorCode::invalid_argument, "unknown study '" + s + "'");
        }
        *report_json = dup_string(report);
        if (rows_csv_out) *rows_csv_out = dup_string(csv);
    });
}

rhull_status rhull_file_sha256(const char* path, char** hex) {
    return guarded([&] {
        require(path && hex, "null argument");
        *hex = nullptr;
        *hex = dup_string(sha256_file(path));
    });
}

}  // extern "C"
