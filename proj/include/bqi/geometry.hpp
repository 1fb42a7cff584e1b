#pragma once

// Control-net data model for biquadratic Bezier triangles and quads,
// parametric evaluation, and the residual system (the three bivariate
// polynomials whose simultaneous vanishing characterizes on-surface points).

#include <algorithm>
#include <array>
#include <cmath>

#include "bqi/core.hpp"
#include "bqi/linear_form.hpp"

namespace bqi {

enum class PatchKind { triangle, quad };

inline const char* to_string(PatchKind k) {
    return k == PatchKind::triangle ? "triangle" : "quad";
}

// Six control points; b200, b020, b002 are the domain-triangle vertices.
struct TriangleNet {
    Point3 b200, b020, b002, b110, b101, b011;

    std::array<Point3, 6> points() const { return {b200, b020, b002, b110, b101, b011}; }

    template <class F>
    TriangleNet mapped(F&& f) const {
        return {f(b200), f(b020), f(b002), f(b110), f(b101), f(b011)};
    }
};

// 3x3 control grid; p[i][j] weights B_i(u) * B_j(v).
struct QuadNet {
    std::array<std::array<Point3, 3>, 3> p;

    std::array<Point3, 9> points() const {
        return {p[0][0], p[0][1], p[0][2], p[1][0], p[1][1], p[1][2], p[2][0], p[2][1], p[2][2]};
    }

    template <class F>
    QuadNet mapped(F&& f) const {
        QuadNet r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.p[i][j] = f(p[i][j]);
        return r;
    }
};

// Parameter-domain location with its patch kind. w = 1 - u - v for the
// triangle is always derived, never stored.
struct DomainPoint {
    double u = 0.0, v = 0.0;
    PatchKind kind = PatchKind::triangle;

    static DomainPoint tri(double u, double v) {
        if (!(u >= 0.0) || !(v >= 0.0) || !(u + v <= 1.0))
            throw input_error("DomainPoint: (u,v) outside barycentric triangle");
        return DomainPoint{u, v, PatchKind::triangle};
    }

    static DomainPoint quad(double u, double v) {
        if (!(u >= 0.0) || !(u <= 1.0) || !(v >= 0.0) || !(v <= 1.0))
            throw input_error("DomainPoint: (u,v) outside unit square");
        return DomainPoint{u, v, PatchKind::quad};
    }

    static DomainPoint at(PatchKind k, double u, double v) {
        return k == PatchKind::triangle ? tri(u, v) : quad(u, v);
    }
};

namespace detail {

// Raw polynomial maps without domain checks. The formulas extend to all of
// R^2; the strict-domain wrappers below are the public evaluation surface.
inline Point3 tri_point_raw(const TriangleNet& n, double u, double v) {
    double w = 1.0 - u - v;
    Vec3 acc = (u * u) * n.b200.vec() + (v * v) * n.b020.vec() + (w * w) * n.b002.vec() +
               (2.0 * u * v) * n.b110.vec() + (2.0 * u * w) * n.b101.vec() +
               (2.0 * v * w) * n.b011.vec();
    return Point3::from(acc);
}

inline std::array<double, 3> bernstein2(double t) {
    double s = 1.0 - t;
    return {s * s, 2.0 * t * s, t * t};
}

inline Point3 quad_point_raw(const QuadNet& n, double u, double v) {
    auto bu = bernstein2(u);
    auto bv = bernstein2(v);
    Vec3 acc{};
    for (int i = 0; i < 3; ++i) {
        Vec3 row = bv[0] * n.p[i][0].vec() + bv[1] * n.p[i][1].vec() + bv[2] * n.p[i][2].vec();
        acc = acc + bu[i] * row;
    }
    return Point3::from(acc);
}

inline void tri_partials_raw(const TriangleNet& n, double u, double v, Vec3& du, Vec3& dv) {
    double w = 1.0 - u - v;
    du = 2.0 * (u * n.b200.vec() - w * n.b002.vec() + v * n.b110.vec() +
                (w - u) * n.b101.vec() - v * n.b011.vec());
    dv = 2.0 * (v * n.b020.vec() - w * n.b002.vec() + u * n.b110.vec() +
                (w - v) * n.b011.vec() - u * n.b101.vec());
}

inline void quad_partials_raw(const QuadNet& n, double u, double v, Vec3& du, Vec3& dv) {
    auto bu = bernstein2(u);
    auto bv = bernstein2(v);
    std::array<double, 3> dbu = {-2.0 * (1.0 - u), 2.0 - 4.0 * u, 2.0 * u};
    std::array<double, 3> dbv = {-2.0 * (1.0 - v), 2.0 - 4.0 * v, 2.0 * v};
    du = {};
    dv = {};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            du = du + (dbu[i] * bv[j]) * n.p[i][j].vec();
            dv = dv + (bu[i] * dbv[j]) * n.p[i][j].vec();
        }
}

}  // namespace detail

inline Point3 eval_triangle(const TriangleNet& net, const DomainPoint& d) {
    if (d.kind != PatchKind::triangle) throw input_error("eval_triangle: quad domain point");
    return detail::tri_point_raw(net, d.u, d.v);
}

inline Point3 eval_quad(const QuadNet& net, const DomainPoint& d) {
    if (d.kind != PatchKind::quad) throw input_error("eval_quad: triangle domain point");
    return detail::quad_point_raw(net, d.u, d.v);
}

inline Point3 eval(const TriangleNet& net, const DomainPoint& d) { return eval_triangle(net, d); }
inline Point3 eval(const QuadNet& net, const DomainPoint& d) { return eval_quad(net, d); }

// Largest pairwise control-point distance; the convex hull property makes
// this an upper bound on the patch extent, used to scale tolerances.
template <class Net>
double net_diameter(const Net& net) {
    auto pts = net.points();
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            d = std::max(d, distance(pts[i], pts[j]));
    return d;
}

// ---------------------------------------------------------------------------
// Residual system: f_x, f_y, f_z as bivariate polynomials in (u, v) with
// LinearForm coefficients, stored expanded in the monomial basis. The query
// point enters each polynomial as a -1 coefficient on the constant monomial.

template <class S>
struct ResidualPoly {
    // coefficient of u^i v^j; triangle variants use only i + j <= 2
    std::array<std::array<LinearForm<S>, 3>, 3> c{};

    template <class T>
    LinearForm<S> eval_param(T u, T v) const {
        LinearForm<S> acc{};
        T upow = T(1);
        for (int i = 0; i < 3; ++i) {
            T vpow = T(1);
            for (int j = 0; j < 3; ++j) {
                acc = acc + c[i][j] * (upow * vpow);
                vpow = vpow * v;
            }
            upow = upow * u;
        }
        return acc;
    }
};

template <class S>
struct ResidualSystemT {
    PatchKind kind = PatchKind::triangle;
    ResidualPoly<S> fx, fy, fz;

    const ResidualPoly<S>& axis(int a) const { return a == 0 ? fx : (a == 1 ? fy : fz); }
};

using ResidualSystem = ResidualSystemT<double>;

namespace detail {

template <class S>
S scalar_of(double v) {
    if constexpr (std::is_same_v<S, double>)
        return v;
    else
        return S::from_double(v);
}

}  // namespace detail

template <class S = double>
ResidualSystemT<S> residual_system(const TriangleNet& net) {
    ResidualSystemT<S> rs;
    rs.kind = PatchKind::triangle;
    ResidualPoly<S>* polys[3] = {&rs.fx, &rs.fy, &rs.fz};
    auto coord = [](const Point3& p, int a) { return a == 0 ? p.x : (a == 1 ? p.y : p.z); };
    const S two = detail::scalar_of<S>(2.0);
    for (int a = 0; a < 3; ++a) {
        S b200 = detail::scalar_of<S>(coord(net.b200, a));
        S b020 = detail::scalar_of<S>(coord(net.b020, a));
        S b002 = detail::scalar_of<S>(coord(net.b002, a));
        S b110 = detail::scalar_of<S>(coord(net.b110, a));
        S b101 = detail::scalar_of<S>(coord(net.b101, a));
        S b011 = detail::scalar_of<S>(coord(net.b011, a));
        auto& c = polys[a]->c;
        // expansion of the barycentric form with w = 1 - u - v
        c[0][0].d = b002;
        c[1][0].d = two * (b101 - b002);
        c[0][1].d = two * (b011 - b002);
        c[2][0].d = b200 + b002 - two * b101;
        c[0][2].d = b020 + b002 - two * b011;
        c[1][1].d = two * (b002 + b110 - b101 - b011);
        // query point: exactly -1 on the constant monomial
        (a == 0 ? c[0][0].a : a == 1 ? c[0][0].b : c[0][0].c) = detail::scalar_of<S>(-1.0);
    }
    return rs;
}

template <class S = double>
ResidualSystemT<S> residual_system(const QuadNet& net) {
    // Bernstein-to-monomial conversion: B_i(t) = sum_a conv[i][a] t^a
    static constexpr int conv[3][3] = {{1, -2, 1}, {0, 2, -2}, {0, 0, 1}};
    ResidualSystemT<S> rs;
    rs.kind = PatchKind::quad;
    ResidualPoly<S>* polys[3] = {&rs.fx, &rs.fy, &rs.fz};
    auto coord = [](const Point3& p, int a) { return a == 0 ? p.x : (a == 1 ? p.y : p.z); };
    for (int axis = 0; axis < 3; ++axis) {
        auto& c = polys[axis]->c;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                S acc = detail::scalar_of<S>(0.0);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        int w = conv[i][a] * conv[j][b];
                        if (w == 0) continue;
                        acc = acc + detail::scalar_of<S>(static_cast<double>(w)) *
                                        detail::scalar_of<S>(coord(net.p[i][j], axis));
                    }
                c[a][b].d = acc;
            }
        (axis == 0 ? c[0][0].a : axis == 1 ? c[0][0].b : c[0][0].c) = detail::scalar_of<S>(-1.0);
    }
    return rs;
}

}  // namespace bqi
