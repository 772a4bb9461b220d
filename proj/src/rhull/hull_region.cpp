#include "rhull/hull_region.hpp"

#include <algorithm>
#include <numeric>

namespace rhull {

namespace {

Point left_normal(Point u) { return {-u.y, u.x}; }

double point_segment_distance(Point p, Point a, Point b) {
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return dist(p, a + t * ab);
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) std::swap(a, b);
        parent_[a] = b;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

double BoundaryArc::angle() const {
    if (straight()) return 0;
    return 2 * std::asin(std::min(1.0, chord() / (2 * radius)));
}

double BoundaryArc::length() const { return straight() ? chord() : radius * angle(); }

double BoundaryArc::segment_area() const {
    if (straight()) return 0;
    const double th = angle();
    double th_minus_sin;
    if (th < 1e-3) {
        const double t2 = th * th;
        th_minus_sin = th * t2 / 6 * (1 - t2 / 20 * (1 - t2 / 42));
    } else {
        th_minus_sin = th - std::sin(th);
    }
    return 0.5 * radius * radius * th_minus_sin;
}

bool BoundaryArc::in_sector(Point p) const {
    if (straight()) {
        const Point ab = b - a;
        const double t = dot(p - a, ab);
        return t >= 0 && t <= dot(ab, ab);
    }
    const Point v = p - center;
    return cross(v, a - center) >= 0 && cross(b - center, v) >= 0;
}

double BoundaryArc::distance(Point p) const {
    if (straight()) return point_segment_distance(p, a, b);
    if (in_sector(p)) {
        // |p - c| - r evaluated as (|p-c|^2 - |a-c|^2) / (|p-c| + r).
        const double num = dot(p - a, (p - center) + (a - center));
        return std::fabs(num / (dist(p, center) + radius));
    }
    return std::min(dist(p, a), dist(p, b));
}

bool BoundaryArc::disc_contains(Point p) const {
    if (straight()) return false;
    const double num = dot(p - a, (p - center) + (a - center));
    return num < -1e-12 * radius * chord();
}

BBox BoundaryArc::bounds() const {
    BBox box;
    box.add(a);
    box.add(b);
    if (!straight()) {
        const Point dirs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (Point d : dirs) {
            const Point q = center + radius * d;
            if (in_sector(q)) box.add(q);
        }
    }
    return box;
}

Point BoundaryArc::point_at(double s) const {
    if (straight()) return a + s * (b - a);
    const double d = chord();
    const double th = angle();
    if (th < 1e-2) {
        // Chord parametrisation; the arc height above the chord at offset x is
        // (d^2/4 - x^2) / (sqrt(r^2 - x^2) + t) with t the centre offset.
        const Point u = (1 / d) * (b - a);
        const double x = (s - 0.5) * d;
        const double t = std::sqrt(std::max(0.0, radius * radius - d * d / 4));
        const double h = (d * d / 4 - x * x) / (std::sqrt(radius * radius - x * x) + t);
        return 0.5 * (a + b) + x * u + h * left_normal(u);
    }
    const double phi = -s * th;
    const Point v = a - center;
    const double c = std::cos(phi), sn = std::sin(phi);
    return center + Point{c * v.x - sn * v.y, sn * v.x + c * v.y};
}

HullRegion::HullRegion(IndexPtr index, double r) : index_(std::move(index)), r_(r) {
    if (!(r > 0)) throw Error(ErrorCode::invalid_argument, "hull radius must be positive");
    const TriangulationIndex& idx = *index_;
    const std::size_t n = idx.size();
    scale_ = idx.points().diameter() > 0 ? idx.points().diameter() : 1.0;
    const bool hull_mode = !std::isfinite(r);

    const std::size_t nt = idx.triangle_count();
    kept_.assign(nt, 0);
    on_boundary_.assign(n, 0);
    for (std::size_t t = 0; t < nt; ++t) {
        if (hull_mode || idx.circumradius(t) <= r) {
            kept_[t] = 1;
            triangles_.push_back(t);
        }
    }

    const auto& tri = idx.delaunay().triangles;
    const auto& half = idx.delaunay().halfedges;
    for (std::size_t t : triangles_) {
        for (std::size_t e = 3 * t; e < 3 * t + 3; ++e) {
            const std::size_t twin = half[e];
            if (twin != kNone && kept_[twin / 3]) continue;
            BoundaryArc arc;
            arc.from = tri[e];
            arc.to = tri[Delaunay::next_halfedge(e)];
            arc.a = idx.point(arc.from);
            arc.b = idx.point(arc.to);
            if (!hull_mode) {
                const double d = arc.chord();
                const Point u = (1 / d) * (arc.b - arc.a);
                const double offset = std::sqrt(std::max(0.0, r * r - d * d / 4));
                arc.radius = r;
                arc.center = 0.5 * (arc.a + arc.b) - offset * left_normal(u);
            }
            raw_.push_back(arc);
            raw_halfedge_.push_back(e);
        }
    }

    BBox box = idx.points().bounds();
    for (const auto& arc : raw_) box.add(arc.bounds());
    tri_grid_ = CellGrid(box, std::max<std::size_t>(1, triangles_.size() / 2));
    for (std::size_t k = 0; k < triangles_.size(); ++k) {
        BBox tb;
        for (std::size_t v : idx.triangle(triangles_[k])) tb.add(idx.point(v));
        tri_grid_.insert(k, tb);
    }
    raw_grid_ = CellGrid(box, std::max<std::size_t>(1, raw_.size() / 2));
    for (std::size_t k = 0; k < raw_.size(); ++k) raw_grid_.insert(k, raw_[k].bounds());

    cut_arcs();
    link_pieces();

    const BBox pb = idx.points().bounds();
    const Point origin = pb.empty() ? Point{} : 0.5 * (pb.lo + pb.hi);
    for (const auto& arc : arcs_) {
        area_ += 0.5 * cross(arc.a - origin, arc.b - origin) - arc.segment_area();
        length_ += arc.length();
        if (arc.from != kNone) on_boundary_[arc.from] = 1;
        if (arc.to != kNone) on_boundary_[arc.to] = 1;
    }

    if (idx.collinear() && hull_mode && n >= 2) {
        segment_ = {idx.hull()[0], idx.hull()[1]};
        length_ = dist(idx.point(segment_.first), idx.point(segment_.second));
        std::fill(on_boundary_.begin(), on_boundary_.end(), 1);
    } else {
        std::vector<char> covered(n, 0), touched(n, 0);
        for (std::size_t t : triangles_)
            for (std::size_t v : idx.triangle(t)) covered[v] = 1;
        for (const auto& arc : raw_) touched[arc.from] = touched[arc.to] = 1;
        for (std::size_t i = 0; i < n; ++i) {
            // A corner whose every incident arc was cut away is pinched off.
            if (!covered[i] || (touched[i] && !on_boundary_[i])) {
                isolated_.push_back(i);
                on_boundary_[i] = 1;
            }
        }
    }

    build_components();
    build_boundary_grid();
}

void HullRegion::cut_arcs() {
    struct Cut {
        double lo, hi;
        std::size_t by;
    };
    std::vector<std::size_t> stamp(raw_.size(), kNone);
    std::vector<Cut> cuts;
    raw_piece_begin_.assign(raw_.size() + 1, 0);
    for (std::size_t k = 0; k < raw_.size(); ++k) {
        raw_piece_begin_[k] = arcs_.size();
        const BoundaryArc& arc = raw_[k];
        auto emit = [&](double u0, double u1, std::size_t c0, std::size_t c1) {
            BoundaryArc piece = arc;
            const Point v = arc.a - arc.center;
            auto at = [&](double u) {
                const double c = std::cos(u), sn = std::sin(u);
                return arc.center + Point{c * v.x + sn * v.y, -sn * v.x + c * v.y};
            };
            if (c0 != kNone) {
                piece.a = at(u0);
                piece.from = kNone;
            }
            if (c1 != kNone) {
                piece.b = at(u1);
                piece.to = kNone;
            }
            if (c0 != kNone || c1 != kNone) {
                if (locate(piece.point_at(0.5)) == kNone) return;
            }
            arcs_.push_back(piece);
            piece_raw_.push_back(k);
            start_cause_.push_back(c0);
            end_cause_.push_back(c1);
        };
        if (arc.straight()) {
            emit(0, 0, kNone, kNone);
            continue;
        }
        const double theta = arc.angle();
        const double eps = 1e-9 * theta;
        const double ta = std::atan2(arc.a.y - arc.center.y, arc.a.x - arc.center.x);
        const BBox box = arc.bounds();
        cuts.clear();
        raw_grid_.for_each_in(box, [&](std::size_t m) {
            if (m == k || stamp[m] == k) return;
            stamp[m] = k;
            const Point dc = raw_[m].center - arc.center;
            const double d = norm(dc);
            if (!(d < 2 * r_) || d <= 1e-9 * r_) return;
            const double psi = std::atan2(dc.y, dc.x);
            const double beta = std::acos(d / (2 * r_));
            // Clockwise offset from a of the arc of this circle inside disc m.
            double lo = std::fmod(ta - (psi + beta), 2 * kPi);
            if (lo < 0) lo += 2 * kPi;
            double hi = lo + 2 * beta;
            // A neighbouring circle meets this one at the shared sample. When
            // the two circles are nearly tangent there, the computed crossing
            // drifts off the sample and would leave a sliver cut.
            const double snap = std::min(1e-6, 0.25 * theta);
            auto pin = [&](std::size_t sample, double offset) {
                if (sample == kNone || (raw_[m].from != sample && raw_[m].to != sample)) return;
                const double dl = std::remainder(lo - offset, 2 * kPi);
                const double dh = std::remainder(hi - offset, 2 * kPi);
                if (std::fabs(dl) <= std::fabs(dh)) {
                    if (std::fabs(dl) < snap) lo -= dl;
                } else if (std::fabs(dh) < snap) {
                    hi -= dh;
                }
            };
            pin(arc.from, 0);
            pin(arc.to, theta);
            for (double shift : {0.0, -2 * kPi}) {
                const double a = std::max(lo + shift, 0.0);
                const double b = std::min(hi + shift, theta);
                if (b - a > eps) cuts.push_back({a, b, m});
            }
        });
        if (cuts.empty()) {
            emit(0, theta, kNone, kNone);
            continue;
        }
        std::sort(cuts.begin(), cuts.end(), [](const Cut& x, const Cut& y) { return x.lo < y.lo; });
        double u = 0;
        std::size_t cause = kNone;
        std::size_t i = 0;
        while (i < cuts.size()) {
            const Cut first = cuts[i];
            double hi = first.hi;
            std::size_t hi_by = first.by;
            ++i;
            while (i < cuts.size() && cuts[i].lo <= hi) {
                if (cuts[i].hi > hi) {
                    hi = cuts[i].hi;
                    hi_by = cuts[i].by;
                }
                ++i;
            }
            if (first.lo - u > eps) emit(u, first.lo, cause, first.by);
            u = hi;
            cause = hi_by;
        }
        if (theta - u > eps) emit(u, theta, cause, kNone);
    }
    raw_piece_begin_[raw_.size()] = arcs_.size();
}

std::size_t HullRegion::next_edge_arc(std::size_t k) const {
    const auto& half = index_->delaunay().halfedges;
    std::size_t e = Delaunay::next_halfedge(raw_halfedge_[k]);
    while (true) {
        const std::size_t twin = half[e];
        if (twin == kNone || !kept_[twin / 3]) break;
        e = Delaunay::next_halfedge(twin);
    }
    const auto it = std::lower_bound(raw_halfedge_.begin(), raw_halfedge_.end(), e);
    if (it == raw_halfedge_.end() || *it != e) return kNone;
    return static_cast<std::size_t>(it - raw_halfedge_.begin());
}

void HullRegion::link_pieces() {
    const std::size_t np = arcs_.size();
    next_piece_.assign(np, kNone);
    for (std::size_t p = 0; p < np; ++p) {
        const std::size_t k = piece_raw_[p];
        if (end_cause_[p] == kNone) {
            const std::size_t k2 = next_edge_arc(k);
            if (k2 == kNone) continue;
            const std::size_t q = raw_piece_begin_[k2];
            if (q < raw_piece_begin_[k2 + 1] && start_cause_[q] == kNone) next_piece_[p] = q;
        } else {
            const std::size_t m = end_cause_[p];
            double best = kInf;
            for (std::size_t q = raw_piece_begin_[m]; q < raw_piece_begin_[m + 1]; ++q) {
                if (start_cause_[q] != k) continue;
                const double d = dist(arcs_[q].a, arcs_[p].b);
                if (d < best) {
                    best = d;
                    next_piece_[p] = q;
                }
            }
        }
    }

    std::vector<char> seen(np, 0);
    for (std::size_t start = 0; start < np; ++start) {
        if (seen[start]) continue;
        std::vector<std::size_t> loop;
        std::size_t p = start;
        do {
            seen[p] = 1;
            loop.push_back(p);
            p = next_piece_[p];
        } while (p != start && p != kNone && !seen[p]);
        loops_.push_back(std::move(loop));
    }
}

namespace {

bool inside_polygon(const std::vector<Point>& poly, Point p) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Point a = poly[i], b = poly[j];
        if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
    }
    return in;
}

}  // namespace

void HullRegion::build_components() {
    const TriangulationIndex& idx = *index_;
    const std::size_t n = idx.size();
    UnionFind uf(n);
    for (std::size_t t : triangles_) {
        const auto [i, j, k] = idx.triangle(t);
        uf.unite(i, j);
        uf.unite(j, k);
    }
    if (is_segment())
        for (std::size_t i = 1; i < n; ++i) uf.unite(0, i);

    std::vector<char> isolated(n, 0);
    for (std::size_t i : isolated_) isolated[i] = is_segment() ? 0 : 1;

    // Provisional components: one per isolated sample, and per triangle
    // component either one, or one per outer loop when cutting split it.
    std::size_t next_id = 0;
    std::vector<std::size_t> comp(n, kNone);
    std::vector<std::size_t> root_comp(n, kNone);

    std::vector<std::size_t> loop_root(loops_.size(), kNone);
    std::vector<double> loop_area(loops_.size(), 0);
    std::vector<std::vector<std::size_t>> root_loops(n);
    for (std::size_t l = 0; l < loops_.size(); ++l) {
        const auto& loop = loops_[l];
        const Point o = arcs_[loop.front()].a;
        for (std::size_t p : loop) loop_area[l] += 0.5 * cross(arcs_[p].a - o, arcs_[p].b - o) - arcs_[p].segment_area();
        std::size_t v = kNone;
        for (std::size_t p : loop) {
            if (arcs_[p].from != kNone) {
                v = arcs_[p].from;
                break;
            }
        }
        if (v == kNone) {
            const std::size_t t = locate(arcs_[loop.front()].point_at(0.5));
            v = t != kNone ? idx.triangle(t)[0] : idx.nearest(arcs_[loop.front()].point_at(0.5));
        }
        loop_root[l] = uf.find(v);
        root_loops[loop_root[l]].push_back(l);
    }

    std::vector<std::size_t> loop_comp(loops_.size(), kNone);
    std::vector<std::size_t> split_roots;
    for (std::size_t root = 0; root < n; ++root) {
        std::vector<std::size_t> outer;
        for (std::size_t l : root_loops[root])
            if (loop_area[l] > 0) outer.push_back(l);
        if (outer.size() <= 1) continue;
        split_roots.push_back(root);
        for (std::size_t l : outer) loop_comp[l] = next_id++;
    }

    if (!split_roots.empty()) {
        const double tol = 1e-3 * std::min(scale_, r_);
        std::vector<std::vector<Point>> poly(loops_.size());
        for (std::size_t root : split_roots)
            for (std::size_t l : root_loops[root])
                if (loop_comp[l] != kNone) poly[l] = flatten_loop(loops_[l], tol);
        auto owner = [&](std::size_t root, Point x) {
            std::size_t best = kNone;
            for (std::size_t l : root_loops[root]) {
                if (loop_comp[l] == kNone || !inside_polygon(poly[l], x)) continue;
                if (best == kNone || loop_area[l] < loop_area[best]) best = l;
            }
            if (best == kNone)
                for (std::size_t l : root_loops[root])
                    if (loop_comp[l] != kNone && (best == kNone || loop_area[l] > loop_area[best])) best = l;
            return loop_comp[best];
        };
        std::vector<char> is_split(n, 0);
        for (std::size_t root : split_roots) is_split[root] = 1;
        for (std::size_t root : split_roots)
            for (std::size_t l : root_loops[root])
                if (loop_comp[l] == kNone) loop_comp[l] = owner(root, arcs_[loops_[l].front()].point_at(0.5));
        for (std::size_t l = 0; l < loops_.size(); ++l) {
            if (!is_split[loop_root[l]]) continue;
            for (std::size_t p : loops_[l])
                if (arcs_[p].from != kNone && !isolated[arcs_[p].from]) comp[arcs_[p].from] = loop_comp[l];
        }
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t root = uf.find(i);
            if (is_split[root] && !isolated[i] && comp[i] == kNone) comp[i] = owner(root, idx.point(i));
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (comp[i] != kNone) continue;
        if (isolated[i]) {
            comp[i] = next_id++;
            continue;
        }
        const std::size_t root = uf.find(i);
        if (root_comp[root] == kNone) root_comp[root] = next_id++;
        comp[i] = root_comp[root];
    }
    for (std::size_t l = 0; l < loops_.size(); ++l) {
        if (loop_comp[l] != kNone) continue;
        const std::size_t root = loop_root[l];
        if (root_comp[root] == kNone) root_comp[root] = next_id++;
        loop_comp[l] = root_comp[root];
    }

    std::vector<std::size_t> renumber(next_id, kNone);
    labels_.assign(n, kNone);
    component_count_ = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (renumber[comp[i]] == kNone) renumber[comp[i]] = component_count_++;
        labels_[i] = renumber[comp[i]];
    }
    for (std::size_t l = 0; l < loops_.size(); ++l)
        if (renumber[loop_comp[l]] == kNone) renumber[loop_comp[l]] = component_count_++;
    loop_component_.resize(loops_.size());
    for (std::size_t l = 0; l < loops_.size(); ++l) loop_component_[l] = renumber[loop_comp[l]];
    loop_area_ = std::move(loop_area);
}

void HullRegion::build_boundary_grid() {
    const TriangulationIndex& idx = *index_;
    BBox box = idx.points().bounds();
    for (const auto& arc : arcs_) box.add(arc.bounds());
    const std::size_t items = arcs_.size() + isolated_.size() + (is_segment() ? 1 : 0);
    boundary_grid_ = CellGrid(box, std::max<std::size_t>(1, items / 2));
    for (std::size_t k = 0; k < arcs_.size(); ++k) boundary_grid_.insert(k, arcs_[k].bounds());
    for (std::size_t k = 0; k < isolated_.size(); ++k) {
        const Point p = idx.point(isolated_[k]);
        boundary_grid_.insert(arcs_.size() + k, BBox{p, p});
    }
    if (is_segment()) {
        BBox sb;
        sb.add(idx.point(segment_.first));
        sb.add(idx.point(segment_.second));
        boundary_grid_.insert(arcs_.size() + isolated_.size(), sb);
    }
}

std::size_t HullRegion::locate(Point p) const {
    const double tol = 1e-12 * scale_;
    for (std::size_t k : tri_grid_.cell_items(p)) {
        const std::size_t t = triangles_[k];
        const auto [i, j, l] = index_->triangle(t);
        const Point a = index_->point(i), b = index_->point(j), c = index_->point(l);
        if (orient(a, b, p) >= -tol * dist(a, b) && orient(b, c, p) >= -tol * dist(b, c) &&
            orient(c, a, p) >= -tol * dist(c, a))
            return t;
    }
    return kNone;
}

bool HullRegion::contains(Point p) const {
    const double tol = 1e-12 * scale_;
    if (is_segment()) return boundary_distance(p) <= tol;
    if (locate(p) != kNone) {
        for (std::size_t k : raw_grid_.cell_items(p))
            if (raw_[k].disc_contains(p)) return false;
        return true;
    }
    for (std::size_t k : boundary_grid_.cell_items(p)) {
        if (k >= arcs_.size() && k < arcs_.size() + isolated_.size() &&
            dist(p, index_->point(isolated_[k - arcs_.size()])) <= tol)
            return true;
    }
    return false;
}

double HullRegion::boundary_distance(Point p) const {
    const std::size_t na = arcs_.size(), ni = isolated_.size();
    const auto best = boundary_grid_.nearest(p, [&](std::size_t k) {
        if (k < na) return arcs_[k].distance(p);
        if (k < na + ni) return dist(p, index_->point(isolated_[k - na]));
        return point_segment_distance(p, index_->point(segment_.first), index_->point(segment_.second));
    });
    if (best.first == kNone) throw Error(ErrorCode::empty_region, "region has no boundary");
    return best.second;
}

std::vector<Point> HullRegion::boundary_samples(double step) const {
    std::vector<Point> out;
    if (!(step > 0)) throw Error(ErrorCode::invalid_argument, "boundary sampling step must be positive");
    auto sample_arc = [&](const BoundaryArc& arc) {
        const auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(arc.length() / step)));
        for (std::size_t j = 0; j < k; ++j) out.push_back(arc.point_at(static_cast<double>(j) / static_cast<double>(k)));
        out.push_back(arc.b);
    };
    for (const auto& arc : arcs_) sample_arc(arc);
    for (std::size_t i : isolated_) out.push_back(index_->point(i));
    if (is_segment()) {
        BoundaryArc seg;
        seg.a = index_->point(segment_.first);
        seg.b = index_->point(segment_.second);
        sample_arc(seg);
    }
    return out;
}

std::vector<Point> HullRegion::flatten_loop(const std::vector<std::size_t>& loop, double chord_tol) const {
    std::vector<Point> out;
    for (std::size_t k : loop) {
        const BoundaryArc& arc = arcs_[k];
        out.push_back(arc.a);
        if (arc.straight()) continue;
        const double th = arc.angle();
        const double ratio = std::clamp(1 - chord_tol / arc.radius, -1.0, 1.0);
        const double max_step = 2 * std::acos(ratio);
        std::size_t pieces = 1;
        if (max_step > 0) pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(th / max_step)));
        pieces = std::min<std::size_t>(pieces, 4096);
        for (std::size_t j = 1; j < pieces; ++j)
            out.push_back(arc.point_at(static_cast<double>(j) / static_cast<double>(pieces)));
    }
    return out;
}

HullRegion r_convex_hull(IndexPtr index, double r) {
    if (!(r > 0) || !std::isfinite(r))
        throw Error(ErrorCode::invalid_argument, "r-convex hull radius must be positive and finite");
    return HullRegion(std::move(index), r);
}

HullRegion convex_hull(IndexPtr index) { return HullRegion(std::move(index), kInf); }

ComponentLabels connected_components(const HullRegion& region) {
    ComponentLabels out;
    out.count = region.component_count();
    out.labels.assign(region.labels().begin(), region.labels().end());
    return out;
}

double distance_to_boundary(Point x, const HullRegion& region) { return region.signed_distance(x); }

}  // namespace rhull
