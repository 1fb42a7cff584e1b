#pragma once

// Consumers of the implicit form: ray casting against a patch, closest-point
// parameter inversion, line scans of the implicit function, and the offset
// precision study with its CSV reports.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bqi/expand.hpp"
#include "bqi/normalize.hpp"
#include "bqi/numeric.hpp"
#include "bqi/slp.hpp"

namespace bqi {

struct Ray {
    Point3 origin;
    Vec3 direction;  // unit length within 1e-12

    Ray(Point3 o, Vec3 d) : origin(o), direction(d) {
        if (std::abs(norm(d) - 1.0) > 1e-12)
            throw input_error("Ray: direction must be unit length");
    }

    // Normalizes an arbitrary nonzero direction.
    static Ray through(Point3 o, Vec3 d) {
        double n = norm(d);
        if (n == 0.0) throw input_error("Ray: zero direction");
        return Ray(o, d / n);
    }

    Point3 at(double t) const { return origin + t * direction; }
};

struct RayHit {
    double t = 0.0;
    Point3 point;
    DomainPoint uv;
};

struct InvertResult {
    DomainPoint uv;
    Point3 point;           // eval(net, uv)
    double residual = 0.0;  // |point - query|
    bool on_patch = false;  // residual within the on-patch threshold
};

// ---------------------------------------------------------------------------
// Parameter-domain clamping for the damped Gauss-Newton steps.

namespace detail {

inline void clamp_domain(PatchKind kind, double& u, double& v) {
    u = std::clamp(u, 0.0, 1.0);
    v = std::clamp(v, 0.0, 1.0);
    if (kind == PatchKind::quad) return;
    if (u + v > 1.0) {
        double excess = 0.5 * (u + v - 1.0);
        u = std::clamp(u - excess, 0.0, 1.0);
        v = std::clamp(v - excess, 0.0, 1.0);
        if (u + v > 1.0) v = 1.0 - u;
        // float dust can leave u + v one ulp above 1
        while (u + v > 1.0) v = std::nextafter(v, 0.0);
    }
}

template <class Net>
Point3 point_raw(const Net& net, double u, double v) {
    if constexpr (std::is_same_v<Net, TriangleNet>)
        return tri_point_raw(net, u, v);
    else
        return quad_point_raw(net, u, v);
}

template <class Net>
void partials_raw(const Net& net, double u, double v, Vec3& du, Vec3& dv) {
    if constexpr (std::is_same_v<Net, TriangleNet>)
        tri_partials_raw(net, u, v, du, dv);
    else
        quad_partials_raw(net, u, v, du, dv);
}

constexpr PatchKind kind_of(const TriangleNet*) { return PatchKind::triangle; }
constexpr PatchKind kind_of(const QuadNet*) { return PatchKind::quad; }

}  // namespace detail

struct InvertOptions {
    int seed_grid = 33;          // coarse grid resolution per parameter axis
    int max_iterations = 100;
    double on_patch_rel = 1e-6;  // on-patch threshold in patch diameters
};

// Closest-point inversion: coarse grid seeding plus damped Gauss-Newton on
// the two-variable least-squares problem. Folded patches can trap a single
// descent in a non-global basin, so the few best well-separated grid nodes
// are refined independently. Never throws for far points; the result is
// tagged not-on-patch instead.
template <class Net>
InvertResult invert_point(const Net& net, const Point3& q, const InvertOptions& opt = {}) {
    const PatchKind kind = detail::kind_of(static_cast<const Net*>(nullptr));
    const int g = opt.seed_grid;

    struct Node {
        double u, v, d2;
    };
    std::vector<Node> nodes;
    nodes.reserve(static_cast<std::size_t>(g) * g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            double u = static_cast<double>(i) / (g - 1);
            double v = static_cast<double>(j) / (g - 1);
            if (kind == PatchKind::triangle) {
                v *= 1.0 - u;  // fold the square grid into the triangle
                detail::clamp_domain(kind, u, v);
            }
            Vec3 r = detail::point_raw(net, u, v) - q;
            nodes.push_back({u, v, dot(r, r)});
        }
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.d2 < b.d2; });
    std::vector<Node> seeds;
    const double separation = 3.0 / (g - 1);
    for (const auto& n : nodes) {
        bool fresh = true;
        for (const auto& s : seeds)
            fresh = fresh && std::max(std::abs(n.u - s.u), std::abs(n.v - s.v)) > separation;
        if (fresh) seeds.push_back(n);
        if (seeds.size() == 5) break;
    }

    auto refine = [&](Node seed) {
        double u = seed.u, v = seed.v, err2 = seed.d2;
        double damping = 0.0;  // Levenberg shift, raised on rejected steps
        for (int it = 0; it < opt.max_iterations; ++it) {
            Vec3 du, dv;
            detail::partials_raw(net, u, v, du, dv);
            Vec3 r = detail::point_raw(net, u, v) - q;
            double g0 = dot(du, r), g1 = dot(dv, r);
            double h00 = dot(du, du), h01 = dot(du, dv), h11 = dot(dv, dv);
            double trace = h00 + h11;
            if (!(trace > 0.0)) break;

            bool accepted = false;
            for (int attempt = 0; attempt < 30; ++attempt) {
                double a00 = h00 + damping * trace, a11 = h11 + damping * trace;
                double det = a00 * a11 - h01 * h01;
                if (!(std::abs(det) > 1e-300)) {
                    damping = std::max(damping * 4.0, 1e-8);
                    continue;
                }
                double nu = u - (a11 * g0 - h01 * g1) / det;
                double nv = v - (a00 * g1 - h01 * g0) / det;
                detail::clamp_domain(kind, nu, nv);
                Vec3 nr = detail::point_raw(net, nu, nv) - q;
                double ne2 = dot(nr, nr);
                if (ne2 < err2) {
                    double moved = std::abs(nu - u) + std::abs(nv - v);
                    u = nu;
                    v = nv;
                    err2 = ne2;
                    accepted = true;
                    damping *= 0.25;
                    if (damping < 1e-12) damping = 0.0;
                    if (moved < 1e-15 * (1.0 + std::abs(u) + std::abs(v))) it = opt.max_iterations;
                    break;
                }
                damping = std::max(damping * 4.0, 1e-8);
            }
            if (!accepted) break;
        }
        return Node{u, v, err2};
    };

    Node best{seeds.front().u, seeds.front().v, std::numeric_limits<double>::infinity()};
    for (const auto& seed : seeds) {
        Node r = refine(seed);
        if (r.d2 < best.d2) best = r;
    }

    InvertResult out{DomainPoint::at(kind, best.u, best.v), detail::point_raw(net, best.u, best.v),
                     0.0, false};
    out.residual = distance(out.point, q);
    out.on_patch = out.residual <= opt.on_patch_rel * net_diameter(net);
    return out;
}

// ---------------------------------------------------------------------------
// Univariate real-root isolation on [t0, t1]: 256 initial brackets, adaptive
// grid tripling where the magnitude jumps by more than 10x between
// neighbors, then plain bisection on sign changes.

namespace detail {

inline double eval_univariate(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
    return acc;
}

inline double bisect_root(const std::vector<double>& c, double a, double b, double fa,
                          double tol) {
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        double m = 0.5 * (a + b);
        double fm = eval_univariate(c, m);
        if (fm == 0.0) return m;
        if ((fa < 0.0) == (fm < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Running magnitude bound alongside the Horner evaluation: |result| can be
// trusted down to ~eps times this.
inline double eval_univariate_bound(const std::vector<double>& c, double t) {
    double acc = 0.0;
    double at = std::abs(t);
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * at + std::abs(c[k]);
    return acc;
}

// Complete real-root isolation on [t0, t1] by recursive critical-point
// subdivision: the roots of the derivative split the interval into monotone
// pieces, each holding at most one sign change, which bisection then pins
// down. A uniform grid with sign-change bracketing misses near-tangent root
// pairs that fall inside one cell; this does not.
inline std::vector<double> isolate_roots(const std::vector<double>& coeffs, double t0, double t1) {
    std::vector<double> c = coeffs;
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    std::vector<double> roots;
    if (c.size() <= 1) return roots;  // constant: no isolated roots

    const double tol = 1e-12 * (t1 - t0);
    std::vector<double> breakpoints = {t0, t1};
    if (c.size() > 2) {
        std::vector<double> deriv(c.size() - 1);
        for (std::size_t k = 1; k < c.size(); ++k)
            deriv[k - 1] = static_cast<double>(k) * c[k];
        for (double r : isolate_roots(deriv, t0, t1)) breakpoints.push_back(r);
        std::sort(breakpoints.begin(), breakpoints.end());
    }

    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        double a = breakpoints[i], b = breakpoints[i + 1];
        double fa = eval_univariate(c, a), fb = eval_univariate(c, b);
        if (fa == 0.0)
            roots.push_back(a);
        else if ((fa < 0.0) != (fb < 0.0))
            roots.push_back(bisect_root(c, a, b, fa, tol));
        else if (i > 0 && std::abs(fa) <= 1e-9 * std::max(eval_univariate_bound(c, a), 1e-300))
            roots.push_back(a);  // tangency: a critical point on the zero set
    }
    if (eval_univariate(c, t1) == 0.0) roots.push_back(t1);

    std::sort(roots.begin(), roots.end());
    std::vector<double> unique;
    for (double r : roots)
        if (unique.empty() || r - unique.back() > 4.0 * tol) unique.push_back(r);
    return unique;
}

// Substitute origin + t*dir into the polynomial: univariate coefficients in t.
inline std::vector<double> restrict_to_ray(const TrivariatePoly& p, const Point3& o, Vec3 d) {
    std::vector<double> out(static_cast<std::size_t>(p.max_degree) + 1, 0.0);
    std::vector<double> mono, tmp;
    for (const auto& [e, c] : p.terms) {
        mono.assign(1, c);
        const double lin[3][2] = {{o.x, d.x}, {o.y, d.y}, {o.z, d.z}};
        const int exps[3] = {e.i, e.j, e.k};
        for (int axis = 0; axis < 3; ++axis)
            for (int rep = 0; rep < exps[axis]; ++rep) {
                tmp.assign(mono.size() + 1, 0.0);
                for (std::size_t k = 0; k < mono.size(); ++k) {
                    tmp[k] += mono[k] * lin[axis][0];
                    tmp[k + 1] += mono[k] * lin[axis][1];
                }
                mono.swap(tmp);
            }
        for (std::size_t k = 0; k < mono.size(); ++k) out[k] += mono[k];
    }
    return out;
}

}  // namespace detail

namespace detail {

// Newton polish of an algebraic root onto the parametric intersection:
// solve P(u, v) = origin + t*dir in the three unknowns (u, v, t). The
// expanded polynomial locates roots only to within its evaluation noise over
// the local slope, which a near-tangent ray can stretch far beyond the
// advertised accuracy; the parametric solve does not suffer from that.
template <class Net>
bool polish_hit(const Net& net, const Ray& ray, PatchKind kind, double t0, double t1,
                double scale, double& u, double& v, double& t) {
    double best_err = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 40; ++it) {
        Vec3 f = point_raw(net, u, v) - ray.at(t);
        double err = norm(f);
        if (!(err < best_err * (1.0 - 1e-12)) && it > 0) break;
        best_err = err;
        if (err <= 1e-15 * scale) break;
        Vec3 pu, pv;
        partials_raw(net, u, v, pu, pv);
        // 3x3 solve J * delta = -f with J columns (pu, pv, -dir)
        double a[3][4] = {{pu.x, pv.x, -ray.direction.x, -f.x},
                          {pu.y, pv.y, -ray.direction.y, -f.y},
                          {pu.z, pv.z, -ray.direction.z, -f.z}};
        bool singular = false;
        for (int col = 0; col < 3 && !singular; ++col) {
            int piv = col;
            for (int r = col + 1; r < 3; ++r)
                if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
            if (std::abs(a[piv][col]) < 1e-300) {
                singular = true;
                break;
            }
            std::swap(a[col], a[piv]);
            for (int r = col + 1; r < 3; ++r) {
                double m = a[r][col] / a[col][col];
                for (int cc = col; cc < 4; ++cc) a[r][cc] -= m * a[col][cc];
            }
        }
        if (singular) break;
        double dt = a[2][3] / a[2][2];
        double dv = (a[1][3] - a[1][2] * dt) / a[1][1];
        double du = (a[0][3] - a[0][2] * dt - a[0][1] * dv) / a[0][0];
        u += du;
        v += dv;
        t += dt;
        clamp_domain(kind, u, v);
        t = std::clamp(t, t0, t1);
    }
    return best_err <= 1e-9 * scale;
}

}  // namespace detail

// Ray-patch intersection through the expanded implicit equation. Every
// algebraic root is validated by parameter inversion; the algebraic surface
// extends beyond the patch, so roots that invert to a far point are dropped.
// Surviving roots are polished by a parametric Newton solve.
template <class Net>
std::vector<RayHit> raycast(const Net& net, const Ray& ray, double t0, double t1,
                            const InvertOptions& opt = {}) {
    if (!(t0 < t1)) throw input_error("raycast: empty t range");
    const PatchKind kind = detail::kind_of(static_cast<const Net*>(nullptr));
    CayleyMatrix cm = build_cayley_matrix(net);
    TrivariatePoly poly = expand_resultant(cm);  // throws degenerate_error for broken nets
    std::vector<double> coeffs = detail::restrict_to_ray(poly, ray.origin, ray.direction);
    std::vector<RayHit> hits;
    const double diam = net_diameter(net);
    for (double t : detail::isolate_roots(coeffs, t0, t1)) {
        Point3 h = ray.at(t);
        InvertResult inv = invert_point(net, h, opt);
        double dist0 = distance(inv.point, h);
        // A near-tangent crossing displaces the float root by noise over a
        // tiny slope, so the pre-polish gate is loose; the polished hit must
        // still pass the strict reconstruction test below.
        if (dist0 > 1e-3 * diam) continue;
        double u = inv.uv.u, v = inv.uv.v;
        double tp = t;
        if (detail::polish_hit(net, ray, kind, t0, t1, diam, u, v, tp)) {
            Point3 ph = ray.at(tp);
            if (distance(detail::point_raw(net, u, v), ph) <= opt.on_patch_rel * diam) {
                hits.push_back(RayHit{tp, ph, DomainPoint::at(kind, u, v)});
                continue;
            }
        }
        if (dist0 <= opt.on_patch_rel * diam) hits.push_back(RayHit{t, h, inv.uv});
    }
    std::sort(hits.begin(), hits.end(), [](const RayHit& a, const RayHit& b) { return a.t < b.t; });
    std::vector<RayHit> unique;
    for (const auto& h : hits)
        if (unique.empty() || h.t - unique.back().t > 1e-9 * (t1 - t0)) unique.push_back(h);
    return unique;
}

// ---------------------------------------------------------------------------
// Line scans and the offset precision study.

struct ScanRecord {
    double t = 0.0;
    double implicit_value = 0.0;  // expanded polynomial
    double det_value = 0.0;       // numeric determinant
};

namespace detail {

// Everything needed to evaluate both columns along the scan line, either in
// the world frame or mapped into the normalized frame. The scan parameter t
// stays in world units; the normalized frame rescales it by 1/s.
struct ScanContext {
    CayleyMatrix cm;
    TrivariatePoly poly;
    Point3 base;
    Vec3 dir;
    double t_scale = 1.0;

    Point3 at(double t) const { return base + (t * t_scale) * dir; }
    double poly_value(double t) const { return evaluate_poly(poly, at(t)); }
    double det_value(double t) const { return det_eval(cm, at(t)); }
};

template <class Net>
ScanContext make_scan_context(const Net& net, const DomainPoint& d0, bool use_normalization) {
    Point3 p = eval(net, d0);
    double pn = norm(p.vec());
    if (pn == 0.0) throw degenerate_error("scan_line: surface point at the origin, direction undefined");
    Vec3 vhat = p.vec() / pn;

    ScanContext ctx;
    if (!use_normalization) {
        ctx.cm = build_cayley_matrix(net);
        ctx.poly = expand_resultant(ctx.cm);
        ctx.base = p;
        ctx.dir = vhat;
        ctx.t_scale = 1.0;
        return ctx;
    }
    auto [nnet, t] = normalize_net(net);
    ctx.cm = build_cayley_matrix(nnet);
    ctx.poly = expand_resultant(ctx.cm);
    ctx.base = eval(nnet, d0);  // the mapped scan center, computed at unit scale
    ctx.dir = t.map_direction(vhat);
    ctx.t_scale = 1.0 / t.s;
    return ctx;
}

}  // namespace detail

template <class Net>
std::vector<ScanRecord> scan_line(const Net& net, const DomainPoint& d0, double t0, double t1,
                                  int n_samples, bool use_normalization = false) {
    if (n_samples < 2) throw input_error("scan_line: need at least two samples");
    if (!(t0 < t1)) throw input_error("scan_line: empty t range");
    detail::ScanContext ctx = detail::make_scan_context(net, d0, use_normalization);
    std::vector<ScanRecord> recs;
    recs.reserve(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        double t = t0 + (t1 - t0) * i / (n_samples - 1);
        recs.push_back({t, ctx.poly_value(t), ctx.det_value(t)});
    }
    return recs;
}

struct StudyRow {
    double offset = 0.0;
    std::string mode;  // raw_poly | raw_det | norm_poly | norm_det
    bool crossing_found = false;
    double t_star = std::numeric_limits<double>::quiet_NaN();
    std::string error_flags;  // semicolon-joined; empty when clean
};

struct StudyReport {
    std::vector<StudyRow> rows;
    std::vector<std::string> warnings;
};

struct StudyOptions {
    double u = 0.33, v = 0.33;
    double t0 = -1.0, t1 = 1.0;
    int n_samples = 1001;
    // a detected crossing farther than this from t = 0 counts as failure
    double displacement_tol = 1e-3;
};

namespace detail {

struct CrossingScan {
    int crossings = 0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    double exact_hit = std::numeric_limits<double>::quiet_NaN();
};

template <class F>
CrossingScan count_crossings(F&& value, double t0, double t1, int n) {
    CrossingScan out;
    double prev_t = t0, prev_v = value(t0);
    if (prev_v == 0.0) {
        ++out.crossings;
        out.exact_hit = t0;
    }
    for (int i = 1; i < n; ++i) {
        double t = t0 + (t1 - t0) * i / (n - 1);
        double v = value(t);
        if (v == 0.0) {
            ++out.crossings;
            out.exact_hit = t;
        } else if (prev_v != 0.0 && (v < 0.0) != (prev_v < 0.0)) {
            ++out.crossings;
            out.bracket_lo = prev_t;
            out.bracket_hi = t;
        }
        prev_t = t;
        prev_v = v;
    }
    return out;
}

template <class F>
double refine_crossing(F&& value, double lo, double hi, double tol) {
    double flo = value(lo);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        double m = 0.5 * (lo + hi);
        double fm = value(m);
        if (fm == 0.0) return m;
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = m;
            flo = fm;
        } else {
            hi = m;
        }
    }
    return 0.5 * (lo + hi);
}

template <class F>
StudyRow study_row(double offset, std::string mode, F&& value, const StudyOptions& opt) {
    StudyRow row;
    row.offset = offset;
    row.mode = std::move(mode);
    CrossingScan scan = count_crossings(value, opt.t0, opt.t1, opt.n_samples);
    if (scan.crossings == 0) {
        row.error_flags = "no_sign_change";
        return row;
    }
    if (scan.crossings > 1) {
        row.error_flags = "multiple_crossings";
        return row;
    }
    row.t_star = std::isnan(scan.exact_hit)
                     ? refine_crossing(value, scan.bracket_lo, scan.bracket_hi,
                                       1e-12 * (opt.t1 - opt.t0))
                     : scan.exact_hit;
    if (std::abs(row.t_star) > opt.displacement_tol) {
        row.error_flags = "displaced";
        return row;
    }
    row.crossing_found = true;
    return row;
}

}  // namespace detail

// For each offset m, shifts every control point by (m, m, m) and scans the
// implicit function and determinant along p + t*vhat with and without the
// normalizing pre-transform, recording whether a unique zero crossing near
// t = 0 survives.
template <class Net>
StudyReport precision_study(const Net& net, const std::vector<double>& offsets,
                            const StudyOptions& opt = {}) {
    for (double m : offsets)
        if (!(m >= 0.0)) throw input_error("precision_study: offsets must be non-negative");

    const PatchKind kind = detail::kind_of(static_cast<const Net*>(nullptr));
    StudyReport report;
    for (double m : offsets) {
        Net shifted = net.mapped([&](const Point3& p) { return p + Vec3{m, m, m}; });
        DomainPoint d0 = DomainPoint::at(kind, opt.u, opt.v);
        for (bool normalized : {false, true}) {
            detail::ScanContext ctx = detail::make_scan_context(shifted, d0, normalized);
            const char* prefix = normalized ? "norm" : "raw";
            report.rows.push_back(detail::study_row(
                m, std::string(prefix) + "_poly", [&](double t) { return ctx.poly_value(t); },
                opt));
            report.rows.push_back(detail::study_row(
                m, std::string(prefix) + "_det", [&](double t) { return ctx.det_value(t); }, opt));
        }
    }

    // Failure is expected to be monotone in the offset; flag violations.
    for (const char* mode : {"raw_poly", "raw_det"}) {
        bool failed_before = false;
        double first_fail = 0.0;
        for (const auto& row : report.rows) {
            if (row.mode != mode) continue;
            if (!row.crossing_found) {
                if (!failed_before) first_fail = row.offset;
                failed_before = true;
            } else if (failed_before) {
                report.warnings.push_back(std::string(mode) + ": crossing recovered at offset " +
                                          format_double(row.offset) + " after failing at " +
                                          format_double(first_fail));
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// CSV emission. Column order is part of the format contract.

inline std::string scan_csv(const std::vector<ScanRecord>& recs) {
    std::string s = "t,implicit_value,det_value\n";
    for (const auto& r : recs)
        s += format_double(r.t) + "," + format_double(r.implicit_value) + "," +
             format_double(r.det_value) + "\n";
    return s;
}

inline std::string study_csv(const StudyReport& report) {
    std::string s = "offset,mode,crossing_found,t_star,error_flags\n";
    for (const auto& r : report.rows)
        s += format_double(r.offset) + "," + r.mode + "," +
             (r.crossing_found ? "true" : "false") + "," + format_double(r.t_star) + "," +
             r.error_flags + "\n";
    return s;
}

}  // namespace bqi
