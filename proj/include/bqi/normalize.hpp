#pragma once

// Similarity transform that sends the anchor control points (the domain
// corners b200/b020/b002 of a triangle, p00/p02/p20 of a quad) to (0,0,0),
// (1,0,0) and the z = 0 plane. Zeroes six anchor coordinates and pins one to
// 1, which both shrinks the expanded implicit equation and rescales the net
// to unit magnitude for finite-precision robustness.

#include <array>
#include <cmath>
#include <utility>

#include "bqi/geometry.hpp"

namespace bqi {

struct Mat3 {
    std::array<double, 9> a{};  // row-major

    static Mat3 identity() { return {{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }

    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * 3 + c]; }
    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * 3 + c]; }

    Vec3 apply(Vec3 v) const {
        return {a[0] * v.x + a[1] * v.y + a[2] * v.z, a[3] * v.x + a[4] * v.y + a[5] * v.z,
                a[6] * v.x + a[7] * v.y + a[8] * v.z};
    }

    Mat3 transposed() const {
        return {{a[0], a[3], a[6], a[1], a[4], a[7], a[2], a[5], a[8]}};
    }

    double det() const {
        return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
               a[2] * (a[3] * a[7] - a[4] * a[6]);
    }
};

// Anchors are degenerate (collinear or coincident) below this relative
// cross-product magnitude; the construction loses precision past it.
inline constexpr double kAnchorDegenerateRelTol = 1e-9;

struct NormalizationTransform {
    Mat3 r1;       // aligns the anchor-plane normal with +z
    Mat3 r2;       // rotation about z putting the mapped c2 on the +x axis
    Point3 c1;     // anchor mapped to the origin
    double s = 1;  // uniform scale, |c1 - c2|

    static NormalizationTransform identity() {
        return {Mat3::identity(), Mat3::identity(), Point3{0, 0, 0}, 1.0};
    }

    // Equivalent to R2*(R1*q/s - R1*c1/s); subtracting first keeps the large
    // common offset out of the rotation so it cancels exactly.
    Point3 to_normalized(const Point3& q) const {
        return Point3::from(r2.apply(r1.apply((q - c1) / s)));
    }

    Point3 from_normalized(const Point3& q) const {
        return c1 + s * r1.transposed().apply(r2.transposed().apply(q.vec()));
    }

    Vec3 map_direction(Vec3 v) const { return r2.apply(r1.apply(v)); }
};

namespace detail {

// Minimal rotation carrying unit vector a onto unit vector b (Rodrigues).
// The exactly-aligned cases: identity for a == b, and a half-turn about x
// for a == -b.
inline Mat3 minimal_rotation(Vec3 a, Vec3 b) {
    Vec3 k = cross(a, b);
    double s = norm(k);
    double c = dot(a, b);
    if (s <= 1e-15) {
        if (c >= 0.0) return Mat3::identity();
        return Mat3{{1, 0, 0, 0, -1, 0, 0, 0, -1}};  // half-turn about x
    }
    Vec3 ax = k / s;
    Mat3 r;
    double t = 1.0 - c;
    r.a = {c + t * ax.x * ax.x,       t * ax.x * ax.y - s * ax.z, t * ax.x * ax.z + s * ax.y,
           t * ax.x * ax.y + s * ax.z, c + t * ax.y * ax.y,       t * ax.y * ax.z - s * ax.x,
           t * ax.x * ax.z - s * ax.y, t * ax.y * ax.z + s * ax.x, c + t * ax.z * ax.z};
    return r;
}

template <class Net>
std::array<Point3, 3> normalization_anchors(const Net& net) {
    if constexpr (std::is_same_v<Net, TriangleNet>)
        return {net.b200, net.b020, net.b002};
    else
        return {net.p[0][0], net.p[0][2], net.p[2][0]};
}

template <class Net>
void snap_anchors(Net& net, const Point3& a1, const Point3& a2, const Point3& a3) {
    auto check = [](const Point3& p, double tx, double ty, double tz, const char* what) {
        if (std::abs(p.x - tx) > 1e-12 || std::abs(p.y - ty) > 1e-12 ||
            std::abs(p.z - tz) > 1e-12)
            throw internal_error(std::string("normalize_net: ") + what +
                                 " missed its target pose");
    };
    check(a1, 0, 0, 0, "anchor 1");
    check(a2, 1, 0, 0, "anchor 2");
    if (std::abs(a3.z) > 1e-12) throw internal_error("normalize_net: anchor 3 off the z=0 plane");
    if constexpr (std::is_same_v<Net, TriangleNet>) {
        net.b200 = Point3{0, 0, 0};
        net.b020 = Point3{1, 0, 0};
        net.b002 = Point3{a3.x, a3.y, 0};
    } else {
        net.p[0][0] = Point3{0, 0, 0};
        net.p[0][2] = Point3{1, 0, 0};
        net.p[2][0] = Point3{a3.x, a3.y, 0};
    }
}

}  // namespace detail

template <class Net>
std::pair<Net, NormalizationTransform> normalize_net(const Net& net) {
    auto [c1, c2, c3] = detail::normalization_anchors(net);
    Vec3 e12 = c1 - c2;
    Vec3 e32 = c3 - c2;
    Vec3 n = cross(e12, e32);
    if (norm(n) <= kAnchorDegenerateRelTol * norm(e12) * norm(e32))
        throw degenerate_error("normalize_net: collinear or coincident anchors");

    NormalizationTransform t;
    t.c1 = c1;
    t.s = norm(e12);
    t.r1 = detail::minimal_rotation(n / norm(n), Vec3{0, 0, 1});
    Vec3 v = t.r1.apply((c2 - c1) / t.s);  // unit vector in the z = 0 plane
    double h = std::hypot(v.x, v.y);
    t.r2 = Mat3{{v.x / h, v.y / h, 0, -v.y / h, v.x / h, 0, 0, 0, 1}};

    if (std::abs(t.r1.det() - 1.0) > 1e-12 || std::abs(t.r2.det() - 1.0) > 1e-12)
        throw internal_error("normalize_net: rotation determinant drifted from +1");

    Net out = net.mapped([&](const Point3& p) { return t.to_normalized(p); });
    auto [a1, a2, a3] = detail::normalization_anchors(out);
    detail::snap_anchors(out, a1, a2, a3);
    return {out, t};
}

}  // namespace bqi
