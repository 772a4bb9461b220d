// Command-line front end. Talks to the library only through rhull.h.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rhull/rhull.h"

using nlohmann::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// A failed library call or a check the CLI makes itself.
struct Failure {
    std::string code;
    std::string message;
    int status = -1;
};

struct Usage {
    std::string message;
};

void check(rhull_status s) {
    if (s != RHULL_OK) throw Failure{rhull_status_name(s), rhull_last_error(), static_cast<int>(s)};
}

std::string take(char* s) {
    std::string out = s ? s : "";
    rhull_string_free(s);
    return out;
}

struct PointsHandle {
    rhull_points* p = nullptr;
    ~PointsHandle() { rhull_points_free(p); }
};

struct RegionHandle {
    rhull_region* r = nullptr;
    ~RegionHandle() { rhull_region_free(r); }
};

std::string fmt(double v) {
    if (!std::isfinite(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt(const json& v) { return v.is_number() ? fmt(v.get<double>()) : "inf"; }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Failure{"IoError", "cannot write '" + path + "'"};
    out << text;
    if (!out) throw Failure{"IoError", "failed writing '" + path + "'"};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{"IoError", "cannot read '" + path + "'"};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string file_sha256(const std::string& path) {
    char* hex = nullptr;
    check(rhull_file_sha256(path.c_str(), &hex));
    return take(hex);
}

bool has(const json& args, const char* key) { return args.contains(key) && !args[key].is_null(); }

json ingest_options(const json& args) {
    json o = {{"format", args.value("format", "auto")}, {"equirectangular", args.value("equirectangular", false)}};
    for (const char* key : {"date_from", "date_to", "species"})
        if (has(args, key)) o[key] = args[key];
    return o;
}

// Loads the input; `expected_sha` guards reruns against a changed file.
json load_points(const json& args, PointsHandle& pts, const std::optional<std::string>& expected_sha = {}) {
    const std::string input = args.at("input");
    if (expected_sha && file_sha256(input) != *expected_sha)
        throw Failure{"InputChanged", "'" + input + "' no longer matches the manifest hash"};
    char* report = nullptr;
    check(rhull_points_read(input.c_str(), ingest_options(args).dump().c_str(), &pts.p, &report));
    json r = json::parse(take(report));
    for (const auto& w : r["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
    std::size_t filtered = 0, shown = 0, skipped = 0;
    for (const auto& d : r["diagnostics"]) {
        const std::string msg = d["message"];
        if (msg.find("excluded by") != std::string::npos) {
            ++filtered;
        } else if (shown < 20) {
            std::cerr << "line " << d["line"].get<std::size_t>() << ": " << msg << "\n";
            ++shown;
        } else {
            ++skipped;
        }
    }
    if (skipped) std::cerr << "(" << skipped << " more rows skipped)\n";
    if (filtered) std::cerr << filtered << " rows excluded by filters\n";
    std::cerr << r["rows"].get<std::size_t>() << " rows read from " << input << "\n";
    return r;
}

struct Outputs {
    json list = json::array();

    void add(const std::string& kind, const std::string& path, const std::string& text) {
        write_file(path, text);
        list.push_back({{"kind", kind}, {"path", path}, {"sha256", file_sha256(path)}});
    }
};

json manifest_base(const std::string& command, const json& args) {
    return {{"tool", "rhull"}, {"version", rhull_version()}, {"command", command}, {"arguments", args}};
}

void finish_manifest(json manifest, const json& args, const Outputs& outputs,
                     std::chrono::steady_clock::time_point start) {
    if (!has(args, "out_manifest")) return;
    manifest["outputs"] = outputs.list;
    if (args.value("timing", false)) {
        manifest["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    write_file(args["out_manifest"].get<std::string>(), manifest.dump(2) + "\n");
}

json input_record(const json& report) {
    return {{"sha256", report["input_sha256"]},
            {"rows", report["rows"]},
            {"diagnostics", report["diagnostics"].size()},
            {"duplicates_removed", report["duplicates_removed"]},
            {"x_factor", report["x_factor"]}};
}

json export_options(const json& args, json properties) {
    json o = {{"properties", std::move(properties)}};
    if (has(args, "chord_tolerance")) o["chord_tolerance"] = args["chord_tolerance"];
    return o;
}

json svg_options(const json& args, const std::string& title) {
    json o = {{"title", title}};
    if (has(args, "chord_tolerance")) o["chord_tolerance"] = args["chord_tolerance"];
    return o;
}

void export_region(const rhull_region* region, const json& args, const json& properties, const std::string& title,
                   Outputs& outputs) {
    if (has(args, "out_geojson")) {
        char* gj = nullptr;
        check(rhull_region_geojson(region, export_options(args, properties).dump().c_str(), &gj));
        outputs.add("geojson", args["out_geojson"], take(gj) + "\n");
    }
    if (has(args, "out_svg")) {
        char* svg = nullptr;
        check(rhull_region_svg(region, svg_options(args, title).dump().c_str(), &svg));
        outputs.add("svg", args["out_svg"], take(svg));
    }
}

// ---- commands --------------------------------------------------------------

json run_estimate(const json& args, const std::optional<std::string>& expected_sha) {
    const auto start = std::chrono::steady_clock::now();
    PointsHandle pts;
    const json report = load_points(args, pts, expected_sha);
    json config = json::object();
    for (const char* key : {"alpha", "max_components", "iterations", "r_min", "r_max", "nu", "h0", "bandwidth",
                            "angular_samples", "seed"})
        if (has(args, key)) config[key] = args[key];
    RegionHandle region;
    char* out = nullptr;
    check(rhull_estimate(pts.p, config.dump().c_str(), &region.r, &out));
    const json result = json::parse(take(out));

    std::cout << "r_hat: " << fmt(result["r_hat"]) << "\n"
              << "fallback: " << result["fallback"].get<std::string>() << "\n"
              << "radius: " << fmt(result["radius"]) << "\n"
              << "components: " << result["components"].get<std::size_t>() << "\n"
              << "area: " << fmt(result["area"]) << "\n";

    const json props = {{"r_hat", result["r_hat"]}, {"alpha", result["config"]["alpha"]}};
    Outputs outputs;
    export_region(region.r, args, props, "r_hat = " + fmt(result["r_hat"]), outputs);
    if (has(args, "out_json")) outputs.add("result", args["out_json"], result.dump(2) + "\n");

    json manifest = manifest_base("estimate", args);
    manifest["input"] = input_record(report);
    manifest["sample"] = {{"n", rhull_points_count(pts.p)}, {"hash", report["sample_hash"]}};
    manifest["config"] = result["config"];
    manifest["result"] = {{"r_hat", result["r_hat"]},
                          {"fallback", result["fallback"]},
                          {"radius", result["radius"]},
                          {"components", result["components"]},
                          {"area", result["area"]},
                          {"search_bracket", {result["endpoints"]["r_min"], result["endpoints"]["r_max"]}},
                          {"final_bracket", result["final_bracket"]}};
    finish_manifest(manifest, args, outputs, start);
    return outputs.list;
}

json run_hull(const json& args, const std::optional<std::string>& expected_sha) {
    const auto start = std::chrono::steady_clock::now();
    PointsHandle pts;
    const json report = load_points(args, pts, expected_sha);
    const double r = has(args, "r") ? args["r"].get<double>() : INFINITY;
    RegionHandle region;
    check(rhull_hull_create(pts.p, r, &region.r));
    char* s = nullptr;
    check(rhull_region_summary(region.r, &s));
    const json summary = json::parse(take(s));
    std::cout << "r: " << fmt(summary["radius"]) << "\n"
              << "components: " << summary["components"].get<std::size_t>() << "\n"
              << "isolated points: " << summary["isolated_points"].get<std::size_t>() << "\n"
              << "area: " << fmt(summary["area"]) << "\n";
    Outputs outputs;
    export_region(region.r, args, json::object(), "r = " + fmt(summary["radius"]), outputs);
    json manifest = manifest_base("hull", args);
    manifest["input"] = input_record(report);
    manifest["sample"] = {{"n", rhull_points_count(pts.p)}, {"hash", report["sample_hash"]}};
    manifest["result"] = summary;
    finish_manifest(manifest, args, outputs, start);
    return outputs.list;
}

void run_test(const json& args) {
    PointsHandle pts;
    load_points(args, pts);
    json options = json::object();
    for (const char* key : {"h0", "bandwidth", "angular_samples", "exhaustive"})
        if (has(args, key)) options[key] = args[key];
    char* out = nullptr;
    check(rhull_test(pts.p, args.at("r").get<double>(), args.at("alpha").get<double>(), options.dump().c_str(), &out));
    const json t = json::parse(take(out));
    if (args.value("json", false)) {
        std::cout << t.dump(2) << "\n";
        return;
    }
    std::cout << t["decision"].get<std::string>() << "\n"
              << "r: " << fmt(t["r"]) << "  alpha: " << fmt(t["alpha"]) << "  n: " << t["n"].get<std::size_t>() << "\n"
              << "critical value: " << fmt(t["critical_value"]) << "\n"
              << "bandwidth: " << fmt(t["bandwidth"]) << "\n"
              << "smallest radius m: " << fmt(t["m"]) << "  extreme samples: " << t["extreme_count"].get<std::size_t>()
              << "\n"
              << "components of C_r: " << t["components"].get<std::size_t>() << "\n";
    if (t.contains("max_boundary_distance"))
        std::cout << "max boundary distance: " << fmt(t["max_boundary_distance"])
                  << "  max margin: " << fmt(t["max_margin"]) << "  candidates: " << t["candidate_count"] << "\n";
    if (t["witness"].is_object()) {
        const auto& w = t["witness"];
        std::cout << "witness: center (" << fmt(w["center"][0]) << ", " << fmt(w["center"][1]) << ") radius "
                  << fmt(w["radius"]) << " sample " << w["sample"].get<std::size_t>() << " boundary distance "
                  << fmt(w["boundary_distance"]) << "\n";
    }
}

json run_simulate(const json& args, const std::optional<std::string>& expected_sha) {
    const auto start = std::chrono::steady_clock::now();
    const std::string config_path = args.at("config");
    const std::string sha = file_sha256(config_path);
    if (expected_sha && sha != *expected_sha)
        throw Failure{"InputChanged", "'" + config_path + "' no longer matches the manifest hash"};
    json config;
    try {
        config = json::parse(read_file(config_path));
    } catch (const json::parse_error& e) {
        throw Failure{"ParseError", config_path + ": " + e.what()};
    }
    if (!config.is_object()) throw Failure{"ParseError", config_path + ": expected a JSON object"};
    if (has(args, "seed")) config["seed"] = args["seed"];

    const bool progress = args.value("progress", false);
    auto cb = [](size_t done, size_t total, void*) {
        std::cerr << "\r" << done << "/" << total << (done == total ? "\n" : "") << std::flush;
    };
    char *report = nullptr, *csv = nullptr;
    const std::string study = args.at("study");
    check(rhull_simulate(study.c_str(), config.dump().c_str(), progress ? +cb : nullptr, nullptr, &report, &csv));
    const json r = json::parse(take(report));
    const std::string rows = take(csv);

    Outputs outputs;
    if (has(args, "out")) outputs.add("report", args["out"], r.dump(2) + "\n");
    else std::cout << r.dump(2) << "\n";
    if (has(args, "rows_csv")) outputs.add("rows", args["rows_csv"], rows);

    json manifest = manifest_base("simulate", args);
    manifest["input"] = {{"sha256", sha}};
    manifest["config"] = config;
    finish_manifest(manifest, args, outputs, start);
    return outputs.list;
}

// Replays a manifest and compares every output with the recorded hash.
int run_rerun(const std::string& manifest_path, const std::optional<std::string>& out_dir) {
    json m;
    try {
        m = json::parse(read_file(manifest_path));
    } catch (const json::parse_error& e) {
        throw Failure{"ParseError", manifest_path + ": " + e.what()};
    }
    if (m.value("tool", "") != "rhull" || !m.contains("arguments") || !m.contains("command"))
        throw Failure{"ParseError", manifest_path + ": not an rhull manifest"};
    if (m.value("version", "") != rhull_version())
        std::cerr << "warning: manifest written by version " << m.value("version", "?") << ", running "
                  << rhull_version() << "\n";
    json args = m["arguments"];
    const json recorded = m.value("outputs", json::array());
    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        for (const char* key : {"out_geojson", "out_svg", "out_json", "out_manifest", "out", "rows_csv"})
            if (has(args, key))
                args[key] = (std::filesystem::path(*out_dir) / std::filesystem::path(args[key].get<std::string>()).filename())
                                .string();
    }
    const std::string command = m["command"];
    const std::optional<std::string> sha = m["input"].value("sha256", std::string());
    json produced;
    if (command == "estimate") produced = run_estimate(args, sha);
    else if (command == "hull") produced = run_hull(args, sha);
    else if (command == "simulate") produced = run_simulate(args, sha);
    else throw Failure{"ParseError", "unknown command '" + command + "' in manifest"};

    std::size_t same = 0;
    for (const auto& rec : recorded) {
        bool found = false;
        for (const auto& p : produced)
            if (p["kind"] == rec["kind"]) {
                found = true;
                if (p["sha256"] == rec["sha256"]) ++same;
                else std::cerr << "differs: " << rec["kind"].get<std::string>() << " (" << p["path"].get<std::string>() << ")\n";
            }
        if (!found) std::cerr << "not produced: " << rec["kind"].get<std::string>() << "\n";
    }
    std::cout << "reproduced " << same << " of " << recorded.size() << " outputs\n";
    return same == recorded.size() ? 0 : kExitFailure;
}

// ---- option plumbing ---------------------------------------------------------

struct IngestFlags {
    std::string input, format = "auto";
    std::optional<std::string> date_from, date_to, species;
    bool equirectangular = false;

    void add(CLI::App* cmd) {
        cmd->add_option("input", input, "Occurrence file (CSV or GeoJSON)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--format", format, "Input format")->check(CLI::IsMember({"auto", "csv", "geojson"}));
        cmd->add_option("--date-from", date_from, "Keep rows dated on or after (YYYY[-MM[-DD]])");
        cmd->add_option("--date-to", date_to, "Keep rows dated on or before (YYYY[-MM[-DD]])");
        cmd->add_option("--species", species, "Keep rows of this species");
        cmd->add_flag("--equirectangular", equirectangular,
                      "Scale longitude by the cosine of the mean latitude before computing");
    }

    json to_json() const {
        json j = {{"input", input}, {"format", format}, {"equirectangular", equirectangular}};
        if (date_from) j["date_from"] = *date_from;
        if (date_to) j["date_to"] = *date_to;
        if (species) j["species"] = *species;
        return j;
    }
};

struct ExportFlags {
    std::optional<std::string> geojson, svg, manifest;
    std::optional<double> chord_tolerance;
    bool timing = false;

    void add(CLI::App* cmd) {
        cmd->add_option("--out-geojson", geojson, "Write the region as a GeoJSON FeatureCollection");
        cmd->add_option("--out-svg", svg, "Write an SVG figure");
        cmd->add_option("--out-manifest", manifest, "Write a run manifest");
        cmd->add_option("--chord-tolerance", chord_tolerance, "Arc flattening tolerance (default r/256)")
            ->check(CLI::PositiveNumber);
        cmd->add_flag("--timing", timing, "Record wall-clock time in the manifest");
    }

    void into(json& j) const {
        if (geojson) j["out_geojson"] = *geojson;
        if (svg) j["out_svg"] = *svg;
        if (manifest) j["out_manifest"] = *manifest;
        if (chord_tolerance) j["chord_tolerance"] = *chord_tolerance;
        j["timing"] = timing;
    }
};

void check_alpha(double alpha) {
    if (!(alpha > 0 && alpha < 1)) throw Usage{"--alpha must lie in (0, 1)"};
}

void print_error(const std::string& code, const std::string& message, int status) {
    json e = {{"error", {{"code", code}, {"message", message}}}};
    if (status >= 0) e["error"]["status"] = status;
    std::cerr << e.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"r-convex support estimation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(rhull_version()));

    // estimate
    auto* est = app.add_subcommand("estimate", "Select r0 and export the estimated support");
    IngestFlags est_in;
    ExportFlags est_out;
    double alpha = 0.01;
    std::size_t max_components = 4, iterations = 20;
    std::optional<double> r_min, r_max, bandwidth;
    double nu = 1, h0 = 1;
    std::uint64_t seed = 0;
    std::optional<std::string> out_json;
    est_in.add(est);
    est->add_option("--alpha", alpha, "Significance level")->capture_default_str();
    est->add_option("--max-components", max_components, "Largest admissible number of components")->capture_default_str()
        ->check(CLI::PositiveNumber);
    est->add_option("--iterations", iterations, "Bisection steps")->capture_default_str()->check(CLI::PositiveNumber);
    est->add_option("--r-min", r_min, "Lower end of the search bracket");
    est->add_option("--r-max", r_max, "Upper end of the search bracket");
    est->add_option("--nu", nu, "Shrink factor applied to r_hat")->capture_default_str();
    est->add_option("--bandwidth-h0", h0, "Bandwidth multiplier h0")->capture_default_str()->check(CLI::PositiveNumber);
    est->add_option("--bandwidth", bandwidth, "Fixed kernel bandwidth")->check(CLI::PositiveNumber);
    est->add_option("--seed", seed, "Seed recorded in the manifest")->capture_default_str();
    est->add_option("--out-json", out_json, "Write the full selection report as JSON");
    est_out.add(est);

    // test
    auto* tst = app.add_subcommand("test", "Test whether the support is r-convex");
    IngestFlags tst_in;
    double test_r = 0, test_alpha = 0.05, test_h0 = 1;
    std::optional<double> test_bandwidth;
    bool exhaustive = false, test_json = false;
    tst_in.add(tst);
    tst->add_option("--r", test_r, "Radius under test")->required();
    tst->add_option("--alpha", test_alpha, "Significance level")->capture_default_str();
    tst->add_option("--bandwidth-h0", test_h0, "Bandwidth multiplier h0")->capture_default_str()->check(CLI::PositiveNumber);
    tst->add_option("--bandwidth", test_bandwidth, "Fixed kernel bandwidth")->check(CLI::PositiveNumber);
    tst->add_flag("--exhaustive", exhaustive, "Evaluate every candidate centre");
    tst->add_flag("--json", test_json, "Print the result as JSON");

    // hull
    auto* hul = app.add_subcommand("hull", "Build C_r for a given r and export it");
    IngestFlags hul_in;
    ExportFlags hul_out;
    std::optional<double> hull_r;
    bool convex = false;
    hul_in.add(hul);
    hul->add_option("--r", hull_r, "Radius");
    hul->add_flag("--convex", convex, "Use the convex hull (r = infinity)");
    hul_out.add(hul);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run a simulation study");
    std::string study, config_path;
    std::optional<std::uint64_t> sim_seed;
    std::optional<std::string> sim_out, rows_csv, sim_manifest;
    bool progress = false, sim_timing = false;
    sim->add_option("study", study, "Study")->required()->check(CLI::IsMember({"level-power", "rate", "consistency"}));
    sim->add_option("--config", config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sim->add_option("--seed", sim_seed, "Master seed (overrides the config)");
    sim->add_option("--out", sim_out, "Write the JSON report here instead of stdout");
    sim->add_option("--rows-csv", rows_csv, "Write per-replicate rows as CSV");
    sim->add_option("--out-manifest", sim_manifest, "Write a run manifest");
    sim->add_flag("--progress", progress, "Report progress on stderr");
    sim->add_flag("--timing", sim_timing, "Record wall-clock time in the manifest");

    // rerun
    auto* rer = app.add_subcommand("rerun", "Replay a manifest and check its outputs");
    std::string manifest_path;
    std::optional<std::string> out_dir;
    rer->add_option("manifest", manifest_path, "Manifest file")->required()->check(CLI::ExistingFile);
    rer->add_option("--out-dir", out_dir, "Write outputs here instead of their recorded paths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        print_error("UsageError", e.what(), -1);
        return kExitUsage;
    }

    try {
        if (*est) {
            check_alpha(alpha);
            if (r_min && !(*r_min > 0)) throw Usage{"--r-min must be positive"};
            if (r_max && !(*r_max > 0)) throw Usage{"--r-max must be positive"};
            if (r_min && r_max && *r_min >= *r_max) throw Usage{"--r-min must be smaller than --r-max"};
            if (!(nu > 0 && nu <= 1)) throw Usage{"--nu must lie in (0, 1]"};
            json args = est_in.to_json();
            args["alpha"] = alpha;
            args["max_components"] = max_components;
            args["iterations"] = iterations;
            if (r_min) args["r_min"] = *r_min;
            if (r_max) args["r_max"] = *r_max;
            args["nu"] = nu;
            args["h0"] = h0;
            if (bandwidth) args["bandwidth"] = *bandwidth;
            args["seed"] = seed;
            if (out_json) args["out_json"] = *out_json;
            est_out.into(args);
            run_estimate(args, std::nullopt);
        } else if (*tst) {
            check_alpha(test_alpha);
            if (!(test_r > 0)) throw Usage{"--r must be positive"};
            json args = tst_in.to_json();
            args["r"] = test_r;
            args["alpha"] = test_alpha;
            args["h0"] = test_h0;
            if (test_bandwidth) args["bandwidth"] = *test_bandwidth;
            args["exhaustive"] = exhaustive;
            args["json"] = test_json;
            run_test(args);
        } else if (*hul) {
            if (convex == hull_r.has_value()) throw Usage{"give exactly one of --r and --convex"};
            if (hull_r && !(*hull_r > 0)) throw Usage{"--r must be positive"};
            json args = hul_in.to_json();
            if (hull_r) args["r"] = *hull_r;
            hul_out.into(args);
            run_hull(args, std::nullopt);
        } else if (*sim) {
            json args = {{"study", study}, {"config", config_path}, {"progress", progress}, {"timing", sim_timing}};
            if (sim_seed) args["seed"] = *sim_seed;
            if (sim_out) args["out"] = *sim_out;
            if (rows_csv) args["rows_csv"] = *rows_csv;
            if (sim_manifest) args["out_manifest"] = *sim_manifest;
            run_simulate(args, std::nullopt);
        } else if (*rer) {
            return run_rerun(manifest_path, out_dir);
        }
    } catch (const Usage& u) {
        print_error("UsageError", u.message, -1);
        return kExitUsage;
    } catch (const Failure& f) {
        print_error(f.code, f.message, f.status);
        return kExitFailure;
    } catch (const std::exception& e) {
        print_error("InternalError", e.what(), -1);
        return kExitFailure;
    }
    return 0;
}
