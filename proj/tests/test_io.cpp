#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <set>

#include "rhull/io.hpp"
#include "support/oracles.hpp"

using namespace rhull;
using nlohmann::json;

namespace {

IndexPtr make_index(std::vector<Point> pts) { return build_index(PointSet(std::move(pts))); }

bool near_ring(const json& ring, Point p, double tol) {
    for (std::size_t k = 0; k + 1 < ring.size(); ++k) {
        const Point a{ring[k][0].get<double>(), ring[k][1].get<double>()};
        const Point b{ring[k + 1][0].get<double>(), ring[k + 1][1].get<double>()};
        const Point ab = b - a, ap = p - a;
        const double t = std::clamp(dot(ap, ab) / std::max(dot(ab, ab), 1e-300), 0.0, 1.0);
        if (norm(ap - t * ab) <= tol) return true;
    }
    return false;
}

int winding_parity(const json& ring, Point p) {
    int in = 0;
    for (std::size_t k = 0; k + 1 < ring.size(); ++k) {
        const double ax = ring[k][0], ay = ring[k][1], bx = ring[k + 1][0], by = ring[k + 1][1];
        if ((ay > p.y) != (by > p.y) && p.x < (bx - ax) * (p.y - ay) / (by - ay) + ax) in ^= 1;
    }
    return in;
}

// True when p lies in or on some exported polygon, or is an exported point.
bool covered(const json& fc, Point p) {
    for (const auto& f : fc["features"]) {
        const auto& g = f["geometry"];
        if (g["type"] == "Point") {
            if (g["coordinates"][0] == p.x && g["coordinates"][1] == p.y) return true;
            continue;
        }
        if (g["type"] != "MultiPolygon") continue;
        for (const auto& poly : g["coordinates"]) {
            int parity = 0;
            for (const auto& ring : poly) {
                if (near_ring(ring, p, 1e-9)) return true;
                parity ^= winding_parity(ring, p);
            }
            if (parity) return true;
        }
    }
    return false;
}

}  // namespace

TEST(Ingest, CsvMissingCoordinateBecomesDiagnostic) {
    const auto t = read_csv("x,y\n0,0\n1,\n2,3\n");
    ASSERT_EQ(t.rows.size(), 2u);
    ASSERT_EQ(t.diagnostics.size(), 1u);
    EXPECT_EQ(t.diagnostics[0].line, 3u);
    EXPECT_EQ(t.rows[1].p.x, 2);
    EXPECT_EQ(t.rows[1].p.y, 3);
    EXPECT_EQ(t.rows[1].line, 4u);
}

TEST(Ingest, CsvDetectsDelimiterAndGbifColumns) {
    const auto tab = read_csv("gbifID\tspecies\tdecimalLatitude\tdecimalLongitude\teventDate\n"
                              "11\tCrambe azorica\t38.5\t-28.1\t2016-05-01\n"
                              "12\tCrambe azorica\t38.6\t-28.2\t2015\n");
    EXPECT_EQ(tab.delimiter, "\\t");
    ASSERT_EQ(tab.rows.size(), 2u);
    EXPECT_EQ(tab.rows[0].p.x, -28.1);
    EXPECT_EQ(tab.rows[0].p.y, 38.5);
    EXPECT_EQ(*tab.rows[0].id, "11");
    EXPECT_EQ(*tab.rows[1].date, "2015");

    const auto semi = read_csv("\xEF\xBB\xBFX;Y;note\r\n1,5;2;a\r\n\"3\";\"4\";\"b;c\"\r\n");
    EXPECT_EQ(semi.delimiter, ";");
    ASSERT_EQ(semi.rows.size(), 1u);  // "1,5" is not a number
    EXPECT_EQ(semi.diagnostics.size(), 1u);
    EXPECT_EQ(semi.rows[0].p.x, 3);
}

TEST(Ingest, CsvQuotedFieldsSpanLines) {
    const auto t = read_csv("id,x,y\n\"a\nb\",1,1\n\"c\"\"d\",2,2\n");
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(*t.rows[0].id, "a\nb");
    EXPECT_EQ(*t.rows[1].id, "c\"d");
    EXPECT_EQ(t.rows[1].line, 4u);
}

TEST(Ingest, CsvErrors) {
    auto code = [](const std::string& text) {
        try {
            read_csv(text);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode{};
    };
    EXPECT_EQ(code("a,b\n1,2\n"), ErrorCode::parse_error);
    EXPECT_EQ(code("x,y\n\"1,2\n"), ErrorCode::parse_error);
    EXPECT_EQ(code("x,y\n"), ErrorCode::empty_input);
    EXPECT_EQ(code("x,y\n,\nfoo,1\n"), ErrorCode::empty_after_filter);
    try {
        read_csv("x,y\n1,1\n\"2,2\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(Ingest, DuplicatesKeepFirstWithWarning) {
    const auto t = read_csv("id,x,y\na,0,0\nb,1,1\nc,0,0\n");
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.duplicates_removed, 1u);
    ASSERT_EQ(t.warnings.size(), 1u);
    EXPECT_EQ(*t.rows[0].id, "a");
}

TEST(Ingest, DateFilterKeepsOnlyThatYear) {
    const std::string csv =
        "x,y,eventDate\n0,0,2015-06-01\n1,0,2016-01-01\n2,0,2016-12-31T23:00:00\n3,0,2017-01-01\n"
        "4,0,2016-07\n5,0,\n6,0,2016\n7,0,2015-12-31/2016-01-02\n8,0,2016-02-01/2016-03\n";
    IngestOptions o;
    o.date_from = "2016-01-01";
    o.date_to = "2016-12-31";
    const auto t = read_csv(csv, o);
    std::vector<double> xs;
    for (const auto& r : t.rows) xs.push_back(r.p.x);
    EXPECT_EQ(xs, (std::vector<double>{1, 2, 4, 6, 8}));
    EXPECT_EQ(t.diagnostics.size(), 4u);
    o.date_from = "2016-13";
    EXPECT_THROW(read_csv(csv, o), Error);
}

TEST(Ingest, SpeciesFilter) {
    IngestOptions o;
    o.species = "A b";
    const auto t = read_csv("x,y,species\n0,0,A b\n1,1,C d\n2,2,A b\n", o);
    EXPECT_EQ(t.rows.size(), 2u);
}

TEST(Ingest, DateKeys) {
    EXPECT_EQ(*date_key("2016", true), "2016-01-01");
    EXPECT_EQ(*date_key("2016", false), "2016-12-31");
    EXPECT_EQ(*date_key("2016-02", false), "2016-02-31");
    EXPECT_EQ(*date_key("2015-12-31/2016-01", false), "2016-01-31");
    EXPECT_EQ(*date_key("2015-12-31/2016-01", true), "2015-12-31");
    EXPECT_EQ(*date_key(" 2016-02-03T10:00Z ", true), "2016-02-03");
    EXPECT_FALSE(date_key("16-02-03", true));
    EXPECT_FALSE(date_key("2016-2-3", true));
    EXPECT_FALSE(date_key("", true));
}

TEST(Ingest, GeoJsonOneRowPerFeature) {
    const std::string text = R"({"type": "FeatureCollection", "features": [
        {"type": "Feature", "id": 7, "properties": {"eventDate": "2016-03-01"},
         "geometry": {"type": "Point", "coordinates": [1.5, 2.5]}},
        {"type": "Feature", "properties": {"gbifID": "x"},
         "geometry": {"type": "Point", "coordinates": [3, 4, 10]}},
        {"type": "Feature", "properties": null,
         "geometry": {"type": "Point", "coordinates": [5, 6]}}
    ]})";
    const auto t = read_geojson(text);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(*t.rows[0].id, "7");
    EXPECT_EQ(*t.rows[0].date, "2016-03-01");
    EXPECT_EQ(*t.rows[1].id, "x");
    EXPECT_EQ(t.rows[2].p.y, 6);
    EXPECT_TRUE(t.diagnostics.empty());

    const auto mixed = read_geojson(R"({"type": "FeatureCollection", "features": [
        {"type": "Feature", "geometry": {"type": "LineString", "coordinates": [[0,0],[1,1]]}},
        {"type": "Feature", "geometry": {"type": "MultiPoint", "coordinates": [[0,0],[1,1]]}}]})");
    EXPECT_EQ(mixed.rows.size(), 2u);
    EXPECT_EQ(mixed.diagnostics.size(), 1u);
}

TEST(Ingest, GeoJsonErrorsCarryLines) {
    try {
        read_geojson("{\"type\": \"FeatureCollection\",\n \"features\": [\n oops]}");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::parse_error);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    EXPECT_THROW(read_geojson(R"({"type": "Feature"})"), Error);
}

TEST(Files, HashAndFormatDetection) {
    const auto dir = std::filesystem::temp_directory_path() / "rhull_io_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "abc.txt").string();
    write_text_file(path, "abc");
    // Standard SHA-256 test vector.
    EXPECT_EQ(sha256_file(path), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const auto gj = (dir / "pts.geojson").string();
    write_text_file(gj, R"({"type":"FeatureCollection","features":[{"type":"Feature","geometry":{"type":"Point","coordinates":[1,2]}}]})");
    EXPECT_EQ(ingest_file(gj).rows.size(), 1u);
    try {
        ingest_file((dir / "missing.csv").string());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::io_error);
    }
    std::filesystem::remove_all(dir);
}

TEST(Scaling, EquirectangularUsesMeanLatitude) {
    const auto s = equirectangular_scaling({{0, 30}, {1, 50}});
    EXPECT_DOUBLE_EQ(s.reference_latitude, 40);
    EXPECT_DOUBLE_EQ(s.x_factor, std::cos(40 * kPi / 180));
}

TEST(Export, RoundTripAreaWithinChordTolerance) {
    for (double r : {0.08, 0.15, 0.4}) {
        const auto region = r_convex_hull(make_index(oracle::uniform_square(150, 21)), r);
        const double tol = default_chord_tolerance(region);
        EXPECT_DOUBLE_EQ(tol, r / 256);
        const auto fc = region_geojson(region);
        const double exported = geojson_polygon_area(fc);
        // Chords cut across the removed discs, so the polygons can only gain
        // area, and by at most the sagitta times the boundary length.
        EXPECT_GE(exported, region.area() - 1e-9) << r;
        EXPECT_LE(exported, region.area() + tol * region.boundary_length()) << r;
        double reported = 0;
        for (const auto& f : fc["features"]) reported += f["properties"]["area"].get<double>();
        EXPECT_NEAR(reported, region.area(), 1e-9 * std::max(1.0, region.area()));
    }
}

TEST(Export, PolygonsCoverEverySample) {
    for (double r : {0.04, 0.1, 0.3}) {
        const auto pts = oracle::uniform_square(120, 5);
        const auto region = r_convex_hull(make_index(pts), r);
        const auto fc = region_geojson(region);
        for (const Point& p : pts) EXPECT_TRUE(covered(fc, p)) << r << " " << p.x << " " << p.y;
        std::set<std::size_t> comps;
        for (const auto& f : fc["features"]) comps.insert(f["properties"]["component"].get<std::size_t>());
        EXPECT_EQ(comps.size(), region.component_count()) << r;
    }
}

TEST(Export, FeatureLayoutAndProperties) {
    // Two clusters far apart: two polygon features, one isolated point. At
    // r = 3 the arcs at the 45 degree corners do not cross.
    std::vector<Point> pts{{0, 0}, {1, 0}, {0, 1}, {10, 0}, {11, 0}, {10, 1}, {20, 20}};
    const auto region = r_convex_hull(make_index(pts), 3.0);
    ExportOptions o;
    o.properties = {{"r_hat", 1.0}, {"alpha", 0.01}};
    const auto fc = region_geojson(region, o);
    EXPECT_EQ(fc["type"], "FeatureCollection");
    ASSERT_EQ(fc["features"].size(), 3u);
    EXPECT_EQ(geojson_polygon_count(fc), 2u);
    EXPECT_EQ(fc["features"][2]["geometry"]["type"], "Point");
    EXPECT_EQ(fc["features"][2]["properties"]["kind"], "isolated");
    for (const auto& f : fc["features"]) {
        EXPECT_EQ(f["properties"]["alpha"], 0.01);
        EXPECT_EQ(f["properties"]["radius"], 3.0);
    }
    const auto& ring = fc["features"][0]["geometry"]["coordinates"][0][0];
    EXPECT_EQ(ring.front(), ring.back());
    // Counter-clockwise outer ring.
    double a = 0;
    for (std::size_t k = 0; k + 1 < ring.size(); ++k)
        a += ring[k][0].get<double>() * ring[k + 1][1].get<double>() - ring[k + 1][0].get<double>() * ring[k][1].get<double>();
    EXPECT_GT(a, 0);
    EXPECT_NEAR(fc["features"][0]["properties"]["area"].get<double>(), region.area() / 2, 1e-12);
}

TEST(Export, HolesAreSeparateRings) {
    std::vector<Point> pts;
    for (const Point& p : oracle::uniform_disc(2000, 8))
        if (norm(p) >= 0.35) pts.push_back(p);
    const auto region = r_convex_hull(make_index(pts), 0.3);
    const auto fc = region_geojson(region);
    ASSERT_GE(fc["features"].size(), 1u);
    const auto& poly = fc["features"][0]["geometry"]["coordinates"][0];
    ASSERT_GE(poly.size(), 2u);
    // The central hole contains the origin.
    bool hole_has_origin = false;
    for (std::size_t k = 1; k < poly.size(); ++k) hole_has_origin |= winding_parity(poly[k], {0, 0}) == 1;
    EXPECT_TRUE(hole_has_origin);
    EXPECT_FALSE(covered(fc, {0, 0}));
}

TEST(Export, ConvexHullAndSegment) {
    const auto square = convex_hull(make_index({{0, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}}));
    const auto fc = region_geojson(square);
    EXPECT_NEAR(geojson_polygon_area(fc), 4, 1e-12);
    EXPECT_TRUE(fc["features"][0]["properties"]["radius"].is_null());
    const auto seg = convex_hull(make_index({{0, 0}, {1, 1}, {2, 2}}));
    const auto fs = region_geojson(seg);
    ASSERT_EQ(fs["features"].size(), 1u);
    EXPECT_EQ(fs["features"][0]["geometry"]["type"], "LineString");
}

TEST(Export, ScalingIsUndoneOnOutput) {
    const std::vector<Point> pts{{0, 0}, {0.5, 0}, {0, 1}, {0.5, 1}};
    const auto region = convex_hull(make_index(pts));
    ExportOptions o;
    o.x_factor = 0.5;
    const auto fc = region_geojson(region, o);
    EXPECT_NEAR(geojson_polygon_area(fc), 1.0, 1e-12);
    EXPECT_NEAR(fc["features"][0]["properties"]["area"].get<double>(), 1.0, 1e-12);
}

TEST(Export, OutputIsDeterministic) {
    const auto pts = oracle::uniform_square(200, 2);
    const auto a = r_convex_hull(make_index(pts), 0.1);
    const auto b = r_convex_hull(make_index(pts), 0.1);
    EXPECT_EQ(region_geojson(a).dump(), region_geojson(b).dump());
    EXPECT_EQ(region_svg(a), region_svg(b));
}

TEST(Export, SvgCanvasAndIsolatedPoints) {
    const auto pts = oracle::uniform_square(100, 4);
    const auto region = r_convex_hull(make_index(pts), 0.02);
    ASSERT_GT(region.isolated_points().size(), 0u);
    SvgOptions o;
    o.title = "a < b";
    const std::string svg = region_svg(region, o);
    EXPECT_NE(svg.find("width=\"1000\" height=\"1000\""), std::string::npos);
    EXPECT_NE(svg.find("viewBox=\""), std::string::npos);
    EXPECT_NE(svg.find("<title>a &lt; b</title>"), std::string::npos);
    std::size_t circles = 0;
    for (std::size_t pos = 0; (pos = svg.find("<circle", pos)) != std::string::npos; ++pos) ++circles;
    EXPECT_EQ(circles, pts.size() + region.isolated_points().size());
}
