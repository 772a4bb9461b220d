#include "rhull/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace rhull {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::optional<double> parse_number(const std::string& field) {
    const std::string t = trim(field);
    if (t.empty()) return std::nullopt;
    double v = 0;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

Error parse_error(std::size_t line, const std::string& what) {
    return Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + what);
}

struct Record {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

char detect_delimiter(const std::string& header) {
    std::size_t best = 0;
    char out = ',';
    for (char d : {',', '\t', ';'}) {
        std::size_t count = 0;
        bool quoted = false;
        for (char c : header) {
            if (c == '"') quoted = !quoted;
            else if (c == d && !quoted) ++count;
        }
        if (count > best) {
            best = count;
            out = d;
        }
    }
    return out;
}

// RFC 4180 records: quoted fields may contain delimiters, doubled quotes and
// line breaks.
std::vector<Record> split_records(const std::string& text, char delim) {
    std::vector<Record> out;
    Record rec;
    std::string field;
    bool quoted = false, field_started = false;
    std::size_t line = 1;
    rec.line = 1;
    std::size_t quote_line = 0;
    auto end_field = [&] {
        rec.fields.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = rec.fields.size() == 1 && trim(rec.fields[0]).empty();
        if (!blank) out.push_back(std::move(rec));
        rec = Record{};
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (c == '"' && trim(field).empty() && !field_started) {
            quoted = true;
            field_started = true;
            field.clear();
            quote_line = line;
        } else if (c == delim) {
            end_field();
        } else if (c == '\n') {
            end_record();
            ++line;
            rec.line = line;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted) throw parse_error(quote_line, "unterminated quoted field");
    if (!field.empty() || !rec.fields.empty()) end_record();
    return out;
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header, std::initializer_list<const char*> names) {
    for (const char* name : names)
        for (std::size_t i = 0; i < header.size(); ++i)
            if (lower(trim(header[i])) == lower(name)) return i;
    return std::nullopt;
}

// Filters, deduplicates and checks emptiness.
void finish_table(OccurrenceTable& t, std::vector<Occurrence> rows, std::size_t data_rows, const IngestOptions& opt) {
    std::optional<std::string> from, to;
    if (opt.date_from) {
        from = date_key(*opt.date_from, true);
        if (!from) throw Error(ErrorCode::invalid_argument, "invalid date bound '" + *opt.date_from + "'");
    }
    if (opt.date_to) {
        to = date_key(*opt.date_to, false);
        if (!to) throw Error(ErrorCode::invalid_argument, "invalid date bound '" + *opt.date_to + "'");
    }
    std::set<std::pair<double, double>> seen;
    for (auto& row : rows) {
        if (opt.species && row.species.value_or("") != *opt.species) {
            t.diagnostics.push_back({row.line, "excluded by species filter"});
            continue;
        }
        if (from || to) {
            const auto lo = row.date ? date_key(*row.date, true) : std::nullopt;
            const auto hi = row.date ? date_key(*row.date, false) : std::nullopt;
            if (!lo || !hi) {
                t.diagnostics.push_back({row.line, row.date ? "unreadable date '" + *row.date + "'; excluded by date filter"
                                                            : std::string("no date; excluded by date filter")});
                continue;
            }
            if ((from && *lo < *from) || (to && *hi > *to)) {
                t.diagnostics.push_back({row.line, "excluded by date filter"});
                continue;
            }
        }
        if (!seen.insert({row.p.x, row.p.y}).second) {
            ++t.duplicates_removed;
            continue;
        }
        t.rows.push_back(std::move(row));
    }
    if (t.duplicates_removed > 0)
        t.warnings.push_back("removed " + std::to_string(t.duplicates_removed) + " duplicate coordinate" +
                             (t.duplicates_removed == 1 ? "" : "s"));
    if (data_rows == 0) throw Error(ErrorCode::empty_input, "input contains no data rows");
    if (t.rows.empty()) throw Error(ErrorCode::empty_after_filter, "no rows left after parsing and filtering");
}

std::optional<std::string> json_text(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    if (j.is_number()) {
        std::ostringstream os;
        os << std::setprecision(17) << j.get<double>();
        return os.str();
    }
    return std::nullopt;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::vector<Point> flattened(const HullRegion& region, const std::vector<std::size_t>& loop, double tol, double x_factor) {
    auto pts = region.flatten_loop(loop, tol);
    for (auto& p : pts) p.x /= x_factor;
    return pts;
}

double ring_area(const json& ring) {
    double a = 0;
    for (std::size_t k = 0; k + 1 < ring.size(); ++k) {
        a += ring[k][0].get<double>() * ring[k + 1][1].get<double>() - ring[k + 1][0].get<double>() * ring[k][1].get<double>();
    }
    return 0.5 * a;
}

bool inside_ring(const std::vector<Point>& poly, Point p) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Point a = poly[i], b = poly[j];
        if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
    }
    return in;
}

}  // namespace

std::vector<Point> OccurrenceTable::points() const {
    std::vector<Point> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.p);
    return out;
}

std::optional<std::string> date_key(const std::string& text, bool lower_end) {
    std::string s = trim(text);
    if (const auto slash = s.find('/'); slash != std::string::npos)
        s = lower_end ? s.substr(0, slash) : s.substr(slash + 1);
    s = s.substr(0, s.find('T'));
    int y = 0, m = 0, d = 0;
    auto digits = [&](std::size_t pos, std::size_t len, int& out) {
        if (s.size() < pos + len) return false;
        out = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
            out = out * 10 + (s[i] - '0');
        }
        return true;
    };
    if (!digits(0, 4, y)) return std::nullopt;
    if (s.size() == 4) {
        m = lower_end ? 1 : 12;
        d = lower_end ? 1 : 31;
    } else {
        if (s.size() < 7 || s[4] != '-' || !digits(5, 2, m) || m < 1 || m > 12) return std::nullopt;
        if (s.size() == 7) {
            d = lower_end ? 1 : 31;
        } else {
            if (s.size() != 10 || s[7] != '-' || !digits(8, 2, d) || d < 1 || d > 31) return std::nullopt;
        }
    }
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
    return std::string(buf);
}

OccurrenceTable read_csv(const std::string& raw, const IngestOptions& options) {
    std::string text = raw;
    if (text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);
    const std::string first_line = text.substr(0, text.find('\n'));
    const char delim = detect_delimiter(first_line);
    const auto records = split_records(text, delim);
    if (records.empty()) throw Error(ErrorCode::empty_input, "input is empty");

    OccurrenceTable t;
    t.delimiter = delim == '\t' ? "\\t" : std::string(1, delim);
    const auto& header = records.front().fields;
    auto xi = find_column(header, {"x"});
    auto yi = find_column(header, {"y"});
    if (!xi || !yi) {
        xi = find_column(header, {"decimalLongitude"});
        yi = find_column(header, {"decimalLatitude"});
    }
    if (!xi || !yi)
        throw parse_error(records.front().line,
                          "no coordinate columns (expected x and y, or decimalLongitude and decimalLatitude)");
    t.x_column = trim(header[*xi]);
    t.y_column = trim(header[*yi]);
    const auto id_col = find_column(header, {"id", "gbifID"});
    const auto date_col = find_column(header, {"eventDate", "date"});
    const auto species_col = find_column(header, {"species"});

    std::vector<Occurrence> rows;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        auto field = [&](std::optional<std::size_t> c) -> std::optional<std::string> {
            if (!c || *c >= rec.fields.size()) return std::nullopt;
            const std::string v = trim(rec.fields[*c]);
            if (v.empty()) return std::nullopt;
            return v;
        };
        const auto xs = field(xi), ys = field(yi);
        if (!xs || !ys) {
            t.diagnostics.push_back({rec.line, "missing coordinate"});
            continue;
        }
        const auto x = parse_number(*xs), y = parse_number(*ys);
        if (!x || !y) {
            t.diagnostics.push_back({rec.line, "non-numeric coordinate"});
            continue;
        }
        rows.push_back({field(id_col), {*x, *y}, field(date_col), field(species_col), rec.line});
    }
    finish_table(t, std::move(rows), records.size() - 1, options);
    return t;
}

OccurrenceTable read_geojson(const std::string& text, const IngestOptions& options) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
        throw parse_error(line, "invalid JSON");
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
        !doc["features"].is_array())
        throw parse_error(1, "expected a GeoJSON FeatureCollection");

    OccurrenceTable t;
    t.x_column = "longitude";
    t.y_column = "latitude";
    std::vector<Occurrence> rows;
    const auto& features = doc["features"];
    for (std::size_t k = 0; k < features.size(); ++k) {
        const json& f = features[k];
        const std::size_t line = k + 1;
        const json props = f.contains("properties") && f["properties"].is_object() ? f["properties"] : json::object();
        const json* geom = f.contains("geometry") ? &f["geometry"] : nullptr;
        if (!geom || !geom->is_object()) {
            t.diagnostics.push_back({line, "feature without geometry"});
            continue;
        }
        const std::string type = geom->value("type", "");
        std::vector<json> coords;
        if (type == "Point") coords.push_back(geom->value("coordinates", json()));
        else if (type == "MultiPoint") for (const auto& c : geom->value("coordinates", json::array())) coords.push_back(c);
        else {
            t.diagnostics.push_back({line, "unsupported geometry type '" + type + "'"});
            continue;
        }
        Occurrence base;
        base.line = line;
        if (f.contains("id")) base.id = json_text(f["id"]);
        for (const char* key : {"id", "gbifID"})
            if (!base.id && props.contains(key)) base.id = json_text(props[key]);
        for (const char* key : {"eventDate", "date"})
            if (!base.date && props.contains(key)) base.date = json_text(props[key]);
        if (props.contains("species")) base.species = json_text(props["species"]);
        for (const auto& c : coords) {
            if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
                t.diagnostics.push_back({line, "invalid point coordinates"});
                continue;
            }
            Occurrence row = base;
            row.p = {c[0].get<double>(), c[1].get<double>()};
            if (!std::isfinite(row.p.x) || !std::isfinite(row.p.y)) {
                t.diagnostics.push_back({line, "non-finite coordinate"});
                continue;
            }
            rows.push_back(std::move(row));
        }
    }
    finish_table(t, std::move(rows), features.size(), options);
    return t;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error(ErrorCode::io_error, "failed writing '" + path + "'");
}

std::string sha256_file(const std::string& path) {
    const std::string data = read_text_file(path);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::io_error, "hashing failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return os.str();
}

OccurrenceTable ingest_file(const std::string& path, InputFormat format, const IngestOptions& options) {
    if (format == InputFormat::automatic) {
        const std::string ext = lower(path.substr(path.find_last_of('.') == std::string::npos ? path.size() : path.find_last_of('.')));
        format = (ext == ".geojson" || ext == ".json") ? InputFormat::geojson : InputFormat::csv;
    }
    const std::string text = read_text_file(path);
    return format == InputFormat::geojson ? read_geojson(text, options) : read_csv(text, options);
}

PlanarScaling equirectangular_scaling(const std::vector<Point>& lonlat) {
    PlanarScaling s;
    if (lonlat.empty()) return s;
    double sum = 0;
    for (const auto& p : lonlat) sum += p.y;
    s.reference_latitude = sum / static_cast<double>(lonlat.size());
    s.x_factor = std::cos(s.reference_latitude * kPi / 180);
    if (!(s.x_factor > 1e-6)) throw Error(ErrorCode::invalid_argument, "equirectangular scaling undefined near the poles");
    return s;
}

double default_chord_tolerance(const HullRegion& region) {
    if (std::isfinite(region.radius())) return region.radius() / 256;
    const double d = region.bounds().diagonal();
    return d > 0 ? d / 256 : 1.0 / 256;
}

json region_geojson(const HullRegion& region, const ExportOptions& options) {
    const double tol = options.chord_tolerance > 0 ? options.chord_tolerance : default_chord_tolerance(region);
    const double xf = options.x_factor;
    const TriangulationIndex& idx = region.index();
    auto coord = [&](Point p) { return json::array({p.x, p.y}); };

    // component -> (outer loops, holes)
    std::map<std::size_t, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> parts;
    const auto& loops = region.loops();
    for (std::size_t l = 0; l < loops.size(); ++l) {
        auto& slot = parts[region.loop_components()[l]];
        (region.loop_areas()[l] > 0 ? slot.first : slot.second).push_back(l);
    }
    std::map<std::size_t, std::vector<std::size_t>> isolated;
    for (std::size_t i : region.isolated_points()) isolated[region.labels()[i]].push_back(i);

    auto props = [&](std::size_t comp, const char* kind, double area) {
        json p = options.properties;
        p["component"] = comp;
        p["kind"] = kind;
        p["area"] = area;
        p["radius"] = std::isfinite(region.radius()) ? json(region.radius()) : json(nullptr);
        return p;
    };

    json features = json::array();
    if (region.is_segment()) {
        const Point a = idx.point(region.segment().first), b = idx.point(region.segment().second);
        features.push_back({{"type", "Feature"},
                            {"properties", props(0, "segment", 0.0)},
                            {"geometry", {{"type", "LineString"}, {"coordinates", {coord({a.x / xf, a.y}), coord({b.x / xf, b.y})}}}}});
    }
    for (std::size_t comp = 0; comp < region.component_count(); ++comp) {
        if (auto it = parts.find(comp); it != parts.end() && !it->second.first.empty()) {
            const auto& [outer, holes] = it->second;
            std::vector<std::vector<Point>> outer_rings;
            for (std::size_t l : outer) outer_rings.push_back(flattened(region, loops[l], tol, xf));
            std::vector<json> polys(outer.size());
            double area = 0;
            for (std::size_t o = 0; o < outer.size(); ++o) {
                json ring = json::array();
                for (const Point& p : outer_rings[o]) ring.push_back(coord(p));
                ring.push_back(ring.front());
                polys[o] = json::array({ring});
                area += region.loop_areas()[outer[o]];
            }
            for (std::size_t l : holes) {
                const auto pts = flattened(region, loops[l], tol, xf);
                std::size_t owner = 0;
                for (std::size_t o = 0; o < outer.size(); ++o)
                    if (inside_ring(outer_rings[o], pts.front())) owner = o;
                json ring = json::array();
                for (const Point& p : pts) ring.push_back(coord(p));
                ring.push_back(ring.front());
                polys[owner].push_back(ring);
                area += region.loop_areas()[l];
            }
            features.push_back({{"type", "Feature"},
                                {"properties", props(comp, "polygon", area / xf)},
                                {"geometry", {{"type", "MultiPolygon"}, {"coordinates", polys}}}});
        }
        if (auto it = isolated.find(comp); it != isolated.end()) {
            for (std::size_t i : it->second) {
                const Point p = idx.point(i);
                json pr = props(comp, "isolated", 0.0);
                pr["sample"] = i;
                features.push_back({{"type", "Feature"},
                                    {"properties", pr},
                                    {"geometry", {{"type", "Point"}, {"coordinates", coord({p.x / xf, p.y})}}}});
            }
        }
    }
    return {{"type", "FeatureCollection"}, {"features", features}};
}

double geojson_polygon_area(const json& collection) {
    double total = 0;
    for (const auto& f : collection.at("features")) {
        const auto& g = f.at("geometry");
        const std::string type = g.at("type");
        std::vector<json> polys;
        if (type == "Polygon") polys.push_back(g.at("coordinates"));
        else if (type == "MultiPolygon") for (const auto& p : g.at("coordinates")) polys.push_back(p);
        for (const auto& poly : polys) {
            for (std::size_t r = 0; r < poly.size(); ++r) {
                const double a = std::fabs(ring_area(poly[r]));
                total += r == 0 ? a : -a;
            }
        }
    }
    return total;
}

std::size_t geojson_polygon_count(const json& collection) {
    std::size_t count = 0;
    for (const auto& f : collection.at("features")) {
        const auto& g = f.at("geometry");
        const std::string type = g.at("type");
        if (type == "Polygon") ++count;
        else if (type == "MultiPolygon") count += g.at("coordinates").size();
    }
    return count;
}

std::string region_svg(const HullRegion& region, const SvgOptions& options) {
    const double tol = options.chord_tolerance > 0 ? options.chord_tolerance : default_chord_tolerance(region);
    const double xf = options.x_factor;
    const TriangulationIndex& idx = region.index();
    BBox box;
    for (const Point& p : idx.points().points()) box.add(Point{p.x / xf, p.y});
    std::vector<std::vector<Point>> rings;
    for (const auto& loop : region.loops()) {
        rings.push_back(flattened(region, loop, tol, xf));
        for (const Point& p : rings.back()) box.add(p);
    }
    double span = std::max(box.width(), box.height());
    if (!(span > 0)) span = 1;
    box = box.inflated(0.05 * span);
    const double w = box.width() > 0 ? box.width() : span, h = box.height() > 0 ? box.height() : span;
    const double dot = 0.003 * std::max(w, h);

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" viewBox=\"" << fmt(box.lo.x) << ' '
       << fmt(-box.hi.y) << ' ' << fmt(w) << ' ' << fmt(h) << "\">\n";
    if (!options.title.empty()) {
        std::string t;
        for (char c : options.title) {
            if (c == '<') t += "&lt;";
            else if (c == '>') t += "&gt;";
            else if (c == '&') t += "&amp;";
            else t += c;
        }
        os << "<title>" << t << "</title>\n";
    }
    os << "<rect x=\"" << fmt(box.lo.x) << "\" y=\"" << fmt(-box.hi.y) << "\" width=\"" << fmt(w) << "\" height=\""
       << fmt(h) << "\" fill=\"white\"/>\n";
    os << "<g transform=\"scale(1,-1)\">\n";
    if (!rings.empty()) {
        os << "<path fill=\"#9ecae1\" fill-opacity=\"0.6\" fill-rule=\"evenodd\" stroke=\"#08519c\" stroke-width=\"1.5\" "
              "vector-effect=\"non-scaling-stroke\" d=\"";
        for (const auto& ring : rings) {
            for (std::size_t k = 0; k < ring.size(); ++k)
                os << (k == 0 ? "M" : "L") << fmt(ring[k].x) << ' ' << fmt(ring[k].y) << ' ';
            os << "Z ";
        }
        os << "\"/>\n";
    }
    if (region.is_segment()) {
        const Point a = idx.point(region.segment().first), b = idx.point(region.segment().second);
        os << "<line x1=\"" << fmt(a.x / xf) << "\" y1=\"" << fmt(a.y) << "\" x2=\"" << fmt(b.x / xf) << "\" y2=\""
           << fmt(b.y) << "\" stroke=\"#08519c\" stroke-width=\"1.5\" vector-effect=\"non-scaling-stroke\"/>\n";
    }
    os << "<g fill=\"black\">\n";
    for (const Point& p : idx.points().points())
        os << "<circle cx=\"" << fmt(p.x / xf) << "\" cy=\"" << fmt(p.y) << "\" r=\"" << fmt(dot) << "\"/>\n";
    os << "</g>\n<g fill=\"none\" stroke=\"#cb181d\" stroke-width=\"1.2\" vector-effect=\"non-scaling-stroke\">\n";
    for (std::size_t i : region.isolated_points()) {
        const Point p = idx.point(i);
        os << "<circle cx=\"" << fmt(p.x / xf) << "\" cy=\"" << fmt(p.y) << "\" r=\"" << fmt(2.5 * dot) << "\"/>\n";
    }
    os << "</g>\n</g>\n</svg>\n";
    return os.str();
}

}  // namespace rhull
