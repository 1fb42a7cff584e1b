#pragma once

// Basic 3D value types, error categories and float formatting shared by the
// whole library.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bqi {

// ---------------------------------------------------------------------------
// Error categories. not-on-patch is deliberately *not* an error: point
// inversion reports it as a tagged result.

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or rejected input: bad JSON, unknown keys, domain violations.
struct input_error : error {
    using error::error;
};

// Mathematically degenerate configuration: identically-zero resultant,
// collinear anchors, zero scan direction.
struct degenerate_error : error {
    using error::error;
};

// Consistency checks that must never fire; firing means an arithmetic bug.
struct internal_error : error {
    using error::error;
};

// ---------------------------------------------------------------------------

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    friend Vec3 operator+(Vec3 p, Vec3 q) { return {p.x + q.x, p.y + q.y, p.z + q.z}; }
    friend Vec3 operator-(Vec3 p, Vec3 q) { return {p.x - q.x, p.y - q.y, p.z - q.z}; }
    friend Vec3 operator*(double s, Vec3 p) { return {s * p.x, s * p.y, s * p.z}; }
    friend Vec3 operator*(Vec3 p, double s) { return s * p; }
    friend Vec3 operator/(Vec3 p, double s) { return {p.x / s, p.y / s, p.z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    friend bool operator==(Vec3 p, Vec3 q) { return p.x == q.x && p.y == q.y && p.z == q.z; }
};

inline double dot(Vec3 p, Vec3 q) { return p.x * q.x + p.y * q.y + p.z * q.z; }
inline Vec3 cross(Vec3 p, Vec3 q) {
    return {p.y * q.z - p.z * q.y, p.z * q.x - p.x * q.z, p.x * q.y - p.y * q.x};
}
inline double norm(Vec3 p) { return std::sqrt(dot(p, p)); }

// A position in space. Components must be finite; NaN/inf are rejected at
// construction so downstream algebra never has to re-check.
struct Point3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Point3() = default;
    Point3(double px, double py, double pz) : x(px), y(py), z(pz) {
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
            throw input_error("Point3: non-finite component");
    }

    Vec3 vec() const { return {x, y, z}; }
    static Point3 from(Vec3 v) { return {v.x, v.y, v.z}; }

    friend Vec3 operator-(Point3 p, Point3 q) { return {p.x - q.x, p.y - q.y, p.z - q.z}; }
    friend Point3 operator+(Point3 p, Vec3 v) { return {p.x + v.x, p.y + v.y, p.z + v.z}; }
    friend bool operator==(Point3 p, Point3 q) { return p.x == q.x && p.y == q.y && p.z == q.z; }
};

inline double distance(Point3 p, Point3 q) { return norm(p - q); }

// ---------------------------------------------------------------------------
// Shortest round-trip decimal formatting (<= 17 significant digits). All file
// output goes through here so identical inputs produce identical bytes.

inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw input_error("malformed number: '" + std::string(s) + "'");
    return v;
}

}  // namespace bqi
