#pragma once

// Shared test utilities: a portable deterministic RNG (identical streams on
// every platform and standard library), random net generators, and the
// independent oracles the suites check against.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "bqi/bqi.hpp"

namespace bqitest {

// splitmix64: tiny, portable, and good enough for test data.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
    std::uint64_t state_;
};

inline bqi::Point3 random_point(Rng& rng, double lo = -1.0, double hi = 1.5) {
    return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

inline bqi::TriangleNet random_triangle_net(Rng& rng, double lo = -1.0, double hi = 1.5) {
    return {random_point(rng, lo, hi), random_point(rng, lo, hi), random_point(rng, lo, hi),
            random_point(rng, lo, hi), random_point(rng, lo, hi), random_point(rng, lo, hi)};
}

inline bqi::QuadNet random_quad_net(Rng& rng, double lo = -1.0, double hi = 1.5) {
    bqi::QuadNet n;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) n.p[i][j] = random_point(rng, lo, hi);
    return n;
}

// Graph-like random nets: a regular grid with bounded jitter. Independent
// uniform control points produce wildly folded patches whose resultants grow
// zero-set sheets with complex preimages right next to the patch; these stay
// representative of actual surface patches while remaining fully generic.
inline bqi::TriangleNet perturbed_triangle_net(Rng& rng, double amp = 0.15) {
    auto jig = [&](double x, double y, double z) {
        return bqi::Point3{x + rng.uniform(-amp, amp), y + rng.uniform(-amp, amp),
                           z + rng.uniform(-amp, amp)};
    };
    return {jig(1, 0, 0), jig(0, 1, 0), jig(0, 0, 0),
            jig(0.5, 0.5, 0), jig(0.5, 0, 0), jig(0, 0.5, 0)};
}

inline bqi::QuadNet perturbed_quad_net(Rng& rng, double amp = 0.15) {
    bqi::QuadNet n;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            n.p[i][j] = bqi::Point3{0.5 * i + rng.uniform(-amp, amp),
                                    0.5 * j + rng.uniform(-amp, amp), rng.uniform(-amp, amp)};
    return n;
}

inline bqi::DomainPoint random_domain_point(Rng& rng, bqi::PatchKind kind) {
    if (kind == bqi::PatchKind::quad)
        return bqi::DomainPoint::quad(rng.next_double(), rng.next_double());
    for (;;) {
        double u = rng.next_double(), v = rng.next_double();
        if (u + v <= 1.0) return bqi::DomainPoint::tri(u, v);
    }
}

// The triangle spanning the positive octant corners; the standard concrete
// example used across the suites and shipped under data/.
inline bqi::TriangleNet octant_triangle() {
    return {bqi::Point3{1, 0, 0},        bqi::Point3{0, 1, 0},        bqi::Point3{0, 0, 1},
            bqi::Point3{0.65, 0.65, 0},  bqi::Point3{0.65, 0, 0.65},  bqi::Point3{0, 0.65, 0.65}};
}

// ---------------------------------------------------------------------------
// Oracles. These deliberately take different routes than the library.

// de Casteljau evaluation of a quad patch: repeated lerps, no Bernstein
// weights.
inline bqi::Point3 decasteljau_quad(const bqi::QuadNet& n, double u, double v) {
    auto lerp = [](bqi::Vec3 a, bqi::Vec3 b, double t) { return a + t * (b - a); };
    bqi::Vec3 rows[3];
    for (int i = 0; i < 3; ++i) {
        bqi::Vec3 a = lerp(n.p[i][0].vec(), n.p[i][1].vec(), v);
        bqi::Vec3 b = lerp(n.p[i][1].vec(), n.p[i][2].vec(), v);
        rows[i] = lerp(a, b, v);
    }
    bqi::Vec3 a = lerp(rows[0], rows[1], u);
    bqi::Vec3 b = lerp(rows[1], rows[2], u);
    return bqi::Point3::from(lerp(a, b, u));
}

// Cofactor-expansion determinant, the O(n!) reference for det_lu.
inline double cofactor_det(const bqi::SmallMat& m, std::vector<int> cols, int row) {
    if (cols.size() == 1) return m.at(row, cols[0]);
    double acc = 0.0;
    double sign = 1.0;
    for (std::size_t t = 0; t < cols.size(); ++t) {
        std::vector<int> rest;
        for (std::size_t s = 0; s < cols.size(); ++s)
            if (s != t) rest.push_back(cols[s]);
        acc += sign * m.at(row, cols[t]) * cofactor_det(m, rest, row + 1);
        sign = -sign;
    }
    return acc;
}

inline double cofactor_det(const bqi::SmallMat& m) {
    std::vector<int> cols;
    for (int c = 0; c < m.n; ++c) cols.push_back(c);
    return cofactor_det(m, cols, 0);
}

// Brute-force Dixon delta value: numeric 3x3 determinant of the residual
// rows divided by (u - alpha)(v - beta), no polynomial machinery involved.
template <class Net>
double brute_delta_value(const Net& net, bqi::Point3 q, double u, double v, double a, double b) {
    auto rs = bqi::residual_system(net);
    auto value = [&](const bqi::ResidualPoly<double>& f, double uu, double vv) {
        return bqi::eval(f.eval_param(uu, vv), q);
    };
    double m[3][3];
    const bqi::ResidualPoly<double>* fs[3] = {&rs.fx, &rs.fy, &rs.fz};
    for (int c = 0; c < 3; ++c) {
        m[0][c] = value(*fs[c], u, v);
        m[1][c] = value(*fs[c], u, b);
        m[2][c] = value(*fs[c], a, b);
    }
    double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                 m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                 m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    return det / ((u - a) * (v - b));
}

// Evaluate a DixonPoly at concrete (u, v, alpha, beta) and query point.
inline double delta_value_at(const bqi::DixonPoly& delta, bqi::Point3 q, double u, double v,
                             double a, double b) {
    double acc = 0.0;
    for (const auto& [m, c] : delta.poly.terms()) {
        double mono = std::pow(u, m.exp(bqi::Var4::u)) * std::pow(v, m.exp(bqi::Var4::v)) *
                      std::pow(a, m.exp(bqi::Var4::alpha)) * std::pow(b, m.exp(bqi::Var4::beta));
        acc += mono * bqi::eval(c, q);
    }
    return acc;
}

// Dense parametric sampling distance: min over a grid of |eval - q|.
template <class Net>
double sampled_distance(const Net& net, const bqi::Point3& q, int n = 100) {
    constexpr bool is_tri = std::is_same_v<Net, bqi::TriangleNet>;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            double u = static_cast<double>(i) / n;
            double v = static_cast<double>(j) / n;
            if (is_tri) v *= 1.0 - u;
            bqi::Point3 p = is_tri ? bqi::detail::point_raw(net, u, v)
                                   : bqi::detail::point_raw(net, u, v);
            best = std::min(best, bqi::distance(p, q));
        }
    return best;
}

// Pre-sampled patch points for repeated distance queries against one net.
template <class Net>
std::vector<bqi::Point3> sample_patch(const Net& net, int n = 100) {
    constexpr bool is_tri = std::is_same_v<Net, bqi::TriangleNet>;
    std::vector<bqi::Point3> pts;
    pts.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            double u = static_cast<double>(i) / n;
            double v = static_cast<double>(j) / n;
            if (is_tri) v *= 1.0 - u;
            pts.push_back(bqi::detail::point_raw(net, u, v));
        }
    return pts;
}

inline double min_distance(const std::vector<bqi::Point3>& pts, const bqi::Point3& q) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) best = std::min(best, bqi::distance(p, q));
    return best;
}

// Surface normal direction from the parametric partials (not normalized).
template <class Net>
bqi::Vec3 surface_normal(const Net& net, double u, double v) {
    bqi::Vec3 du, dv;
    bqi::detail::partials_raw(net, u, v, du, dv);
    return bqi::cross(du, dv);
}

// Distance from q to the surface extended beyond the patch domain, by
// unconstrained Gauss-Newton from a grid of seeds over [lo, hi]^2. Fixed-grid
// sampling alone under-resolves the stretched far field; the descent does
// not. Entirely geometric: no resultant machinery involved.
template <class Net>
double extended_surface_distance(const Net& net, const bqi::Point3& q, double lo = -1.5,
                                 double hi = 2.5) {
    using bqi::Vec3;
    const int g = 17;
    struct Seed {
        double u, v, d2;
    };
    std::vector<Seed> seeds;
    for (int i = 0; i <= g; ++i)
        for (int j = 0; j <= g; ++j) {
            double u = lo + (hi - lo) * i / g;
            double v = lo + (hi - lo) * j / g;
            Vec3 r = bqi::detail::point_raw(net, u, v) - q;
            seeds.push_back({u, v, bqi::dot(r, r)});
        }
    std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.d2 < b.d2; });
    double best = seeds.front().d2;
    for (int s = 0; s < 12; ++s) {
        double u = seeds[s].u, v = seeds[s].v;
        Vec3 r = bqi::detail::point_raw(net, u, v) - q;
        double e2 = bqi::dot(r, r);
        double damping = 0.0;
        for (int it = 0; it < 60; ++it) {
            Vec3 du, dv;
            bqi::detail::partials_raw(net, u, v, du, dv);
            double g0 = bqi::dot(du, r), g1 = bqi::dot(dv, r);
            double h00 = bqi::dot(du, du), h01 = bqi::dot(du, dv), h11 = bqi::dot(dv, dv);
            double tr = h00 + h11;
            if (!(tr > 0)) break;
            bool ok = false;
            for (int a = 0; a < 20; ++a) {
                double a00 = h00 + damping * tr, a11 = h11 + damping * tr;
                double det = a00 * a11 - h01 * h01;
                if (std::abs(det) < 1e-300) {
                    damping = std::max(4.0 * damping, 1e-8);
                    continue;
                }
                double nu = u - (a11 * g0 - h01 * g1) / det;
                double nv = v - (a00 * g1 - h01 * g0) / det;
                Vec3 nr = bqi::detail::point_raw(net, nu, nv) - q;
                double ne2 = bqi::dot(nr, nr);
                if (ne2 < e2) {
                    u = nu;
                    v = nv;
                    r = nr;
                    e2 = ne2;
                    ok = true;
                    damping *= 0.25;
                    break;
                }
                damping = std::max(4.0 * damping, 1e-8);
            }
            if (!ok) break;
        }
        best = std::min(best, e2);
    }
    return std::sqrt(best);
}

}  // namespace bqitest
