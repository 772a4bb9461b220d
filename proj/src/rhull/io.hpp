#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rhull/hull_region.hpp"

namespace rhull {

struct Occurrence {
    std::optional<std::string> id;
    Point p;
    std::optional<std::string> date;
    std::optional<std::string> species;
    std::size_t line = 0;  // 1-based source line (feature index + 1 for GeoJSON)
};

struct Diagnostic {
    std::size_t line = 0;
    std::string message;
};

struct OccurrenceTable {
    std::vector<Occurrence> rows;
    std::vector<Diagnostic> diagnostics;  // rows skipped or filtered out
    std::vector<std::string> warnings;
    std::size_t duplicates_removed = 0;
    std::string delimiter;  // CSV only
    std::string x_column, y_column;

    std::vector<Point> points() const;
};

struct IngestOptions {
    // Inclusive ISO-8601 bounds (YYYY, YYYY-MM or YYYY-MM-DD).
    std::optional<std::string> date_from, date_to;
    std::optional<std::string> species;
};

enum class InputFormat { automatic, csv, geojson };

// Columns: x/y (any case) or the GBIF names decimalLongitude/decimalLatitude,
// plus optional id (id, gbifID), date (eventDate, date) and species. The
// delimiter is the one of comma, tab and semicolon that occurs most often in
// the header. Rows with missing or non-numeric coordinates are reported as
// diagnostics; exact duplicate coordinates keep their first occurrence.
// Throws ParseError (malformed header, unbalanced quotes) or EmptyAfterFilter.
OccurrenceTable read_csv(const std::string& text, const IngestOptions& options = {});

// FeatureCollection whose Point (or MultiPoint) features become rows.
OccurrenceTable read_geojson(const std::string& text, const IngestOptions& options = {});

OccurrenceTable ingest_file(const std::string& path, InputFormat format = InputFormat::automatic,
                            const IngestOptions& options = {});

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
// Lower-case hex SHA-256 of the file contents.
std::string sha256_file(const std::string& path);

// Normalised comparison key for an ISO date prefix (YYYY[-MM[-DD]]), or
// nullopt when malformed. Missing month/day take the first (lower = true) or
// last possible value. For an interval start/end the lower key comes from the
// start and the upper key from the end. Rows pass a date filter when their
// whole window lies inside the requested range.
std::optional<std::string> date_key(const std::string& text, bool lower);

// Equirectangular correction: x is multiplied by cos(mean latitude).
struct PlanarScaling {
    double x_factor = 1;
    double reference_latitude = 0;
};
PlanarScaling equirectangular_scaling(const std::vector<Point>& lonlat);

struct ExportOptions {
    double chord_tolerance = 0;  // 0: r / 256 (hull extent / 256 for the convex hull)
    double x_factor = 1;         // divide x by this on output (undo a planar scaling)
    nlohmann::json properties = nlohmann::json::object();  // copied onto every feature
};

double default_chord_tolerance(const HullRegion& region);

// RFC 7946 FeatureCollection: one MultiPolygon feature per component with an
// area (outer ring counter-clockwise, holes clockwise, arcs flattened so the
// polygons contain the region), one Point feature per isolated sample, or a
// LineString for a collinear convex hull. Properties: component, area, kind
// plus the caller's.
nlohmann::json region_geojson(const HullRegion& region, const ExportOptions& options = {});

// Polygon area of every MultiPolygon / Polygon feature (holes subtracted).
double geojson_polygon_area(const nlohmann::json& collection);
std::size_t geojson_polygon_count(const nlohmann::json& collection);

struct SvgOptions {
    double chord_tolerance = 0;
    double x_factor = 1;
    std::string title;
};

// 1000x1000 canvas; the viewBox covers the samples and the region with a 5%
// margin, y pointing up. Samples are dots, isolated points are ringed.
std::string region_svg(const HullRegion& region, const SvgOptions& options = {});

}  // namespace rhull
