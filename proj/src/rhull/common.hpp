#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace rhull {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Point {
    double x = 0;
    double y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline double dist2(Point a, Point b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Twice the signed area of (a, b, c); positive when counter-clockwise.
inline double orient(Point a, Point b, Point c) { return cross(b - a, c - a); }

struct BBox {
    Point lo{kInf, kInf};
    Point hi{-kInf, -kInf};

    bool empty() const { return lo.x > hi.x || lo.y > hi.y; }
    void add(Point p) {
        lo.x = std::fmin(lo.x, p.x);
        lo.y = std::fmin(lo.y, p.y);
        hi.x = std::fmax(hi.x, p.x);
        hi.y = std::fmax(hi.y, p.y);
    }
    void add(const BBox& b) {
        if (b.empty()) return;
        add(b.lo);
        add(b.hi);
    }
    BBox inflated(double m) const { return {{lo.x - m, lo.y - m}, {hi.x + m, hi.y + m}}; }
    double width() const { return hi.x - lo.x; }
    double height() const { return hi.y - lo.y; }
    double area() const { return empty() ? 0.0 : width() * height(); }
    double diagonal() const { return empty() ? 0.0 : std::hypot(width(), height()); }
    bool contains(Point p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
};

enum class ErrorCode : int {
    invalid_argument = 1,
    duplicate_points,
    all_collinear,
    empty_input,
    empty_region,
    nonpositive_bandwidth,
    alpha_out_of_range,
    sample_too_small,
    degenerate_support,
    invalid_endpoints,
    parse_error,
    empty_after_filter,
    io_error,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace rhull
