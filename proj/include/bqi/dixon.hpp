#pragma once

// The Dixon delta polynomial and its Cayley matrix factorization. The delta
// polynomial is the 3x3 residual determinant divided exactly by (u - alpha)
// and (v - beta); reshaping its coefficients over fixed row/column monomial
// bases gives the n x n Cayley matrix of LinearForm entries whose numeric
// determinant is the implicit function.

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "bqi/geometry.hpp"
#include "bqi/poly4.hpp"

namespace bqi {

// Relative threshold for "exactly cancels" checks on the float path. The
// exact scalar path requires literal zero instead.
inline constexpr double kCancelRelTol = 1e-12;

template <class S>
struct DixonDeltaT {
    PatchKind kind = PatchKind::triangle;
    SparsePoly4<LinearForm<S>> poly;
    // Construction magnitude: the largest cancellation-free coefficient bound
    // of the determinant. Downstream relative thresholds hang off this.
    double coeff_scale = 0.0;
};

using DixonPoly = DixonDeltaT<double>;

namespace detail {

template <class S>
SparsePoly4<TriLinear<S>> lift_row(const ResidualPoly<S>& f, Var4 first, Var4 second) {
    SparsePoly4<TriLinear<S>> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (f.c[i][j].is_zero()) continue;
            Mono4 m;
            m.e[static_cast<int>(first)] = std::uint8_t(i);
            m.e[static_cast<int>(second)] = std::uint8_t(j);
            r.add_term(m, TriLinear<S>::from(f.c[i][j]));
        }
    return r;
}

// Cancellation-free magnitude shadow of the determinant-and-divide pipeline.
// Every subtraction is replaced by an addition over absolute values, so each
// monomial's result bounds the intermediates that produced the float value at
// that monomial. A float coefficient is cancellation dust exactly when it is
// many orders below its shadow.
struct MagnitudeShadow {
    SparsePoly4<LinearForm<double>> det;
    SparsePoly4<LinearForm<double>> delta;
    SparsePoly4<LinearForm<double>> rem_u, rem_v;
    double det_scale = 0.0;

    double det_floor(const Mono4& m) const { return floor_of(det, m); }

    static double floor_of(const SparsePoly4<LinearForm<double>>& p, const Mono4& m) {
        const LinearForm<double>* c = p.find(m);
        return c ? c->magnitude() : 0.0;
    }
};

inline MagnitudeShadow magnitude_shadow(const ResidualSystemT<double>& rs) {
    ResidualSystemT<double> abs_rs;
    abs_rs.kind = rs.kind;
    ResidualPoly<double>* dst[3] = {&abs_rs.fx, &abs_rs.fy, &abs_rs.fz};
    const ResidualPoly<double>* src[3] = {&rs.fx, &rs.fy, &rs.fz};
    for (int a = 0; a < 3; ++a)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const auto& c = src[a]->c[i][j];
                dst[a]->c[i][j] = {std::abs(c.a), std::abs(c.b), std::abs(c.c), std::abs(c.d)};
            }
    auto row = [&](const ResidualPoly<double>& f, Var4 s1, Var4 s2) {
        return lift_row(f, s1, s2);
    };
    std::array<SparsePoly4<TriLinear<double>>, 3> r1 = {row(abs_rs.fx, Var4::u, Var4::v),
                                                        row(abs_rs.fy, Var4::u, Var4::v),
                                                        row(abs_rs.fz, Var4::u, Var4::v)};
    std::array<SparsePoly4<TriLinear<double>>, 3> r2 = {row(abs_rs.fx, Var4::u, Var4::beta),
                                                        row(abs_rs.fy, Var4::u, Var4::beta),
                                                        row(abs_rs.fz, Var4::u, Var4::beta)};
    std::array<SparsePoly4<TriLinear<double>>, 3> r3 = {row(abs_rs.fx, Var4::alpha, Var4::beta),
                                                        row(abs_rs.fy, Var4::alpha, Var4::beta),
                                                        row(abs_rs.fz, Var4::alpha, Var4::beta)};
    auto minor = [&](int c1, int c2) { return r2[c1] * r3[c2] + r2[c2] * r3[c1]; };
    SparsePoly4<TriLinear<double>> det =
        r1[0] * minor(1, 2) + r1[1] * minor(0, 2) + r1[2] * minor(0, 1);

    MagnitudeShadow sh;
    for (const auto& [m, c] : det.terms()) {
        LinearForm<double> bound{c.comp[1] + c.comp[3] + c.comp[5] + c.comp[7],
                                 c.comp[2] + c.comp[3] + c.comp[6] + c.comp[7],
                                 c.comp[4] + c.comp[5] + c.comp[6] + c.comp[7], c.comp[0]};
        sh.det.add_term(m, bound);
        sh.det_scale = std::max(sh.det_scale, bound.magnitude());
    }
    // synthetic division uses only additions and exponent shifts, so running
    // it on the magnitude polynomial propagates valid bounds
    auto div_u = divide_by_binomial(sh.det, Var4::u, Var4::alpha);
    sh.rem_u = div_u.remainder;
    auto div_v = divide_by_binomial(div_u.quotient, Var4::v, Var4::beta);
    sh.rem_v = div_v.remainder;
    sh.delta = std::move(div_v.quotient);
    return sh;
}

}  // namespace detail

template <class S>
DixonDeltaT<S> build_dixon_delta(const ResidualSystemT<S>& rs) {
    using Row = std::array<SparsePoly4<TriLinear<S>>, 3>;
    // rows of the determinant: f(u, v); f(u, beta); f(alpha, beta)
    Row r1 = {detail::lift_row(rs.fx, Var4::u, Var4::v), detail::lift_row(rs.fy, Var4::u, Var4::v),
              detail::lift_row(rs.fz, Var4::u, Var4::v)};
    Row r2 = {detail::lift_row(rs.fx, Var4::u, Var4::beta),
              detail::lift_row(rs.fy, Var4::u, Var4::beta),
              detail::lift_row(rs.fz, Var4::u, Var4::beta)};
    Row r3 = {detail::lift_row(rs.fx, Var4::alpha, Var4::beta),
              detail::lift_row(rs.fy, Var4::alpha, Var4::beta),
              detail::lift_row(rs.fz, Var4::alpha, Var4::beta)};

    // cofactor expansion along the first row
    auto minor = [&](int c1, int c2) { return r2[c1] * r3[c2] - r2[c2] * r3[c1]; };
    SparsePoly4<TriLinear<S>> det =
        r1[0] * minor(1, 2) - r1[1] * minor(0, 2) + r1[2] * minor(0, 1);

    DixonDeltaT<S> out;
    out.kind = rs.kind;

    if constexpr (std::is_same_v<S, double>) {
        detail::MagnitudeShadow shadow = detail::magnitude_shadow(rs);
        out.coeff_scale = shadow.det_scale;

        // The determinant is linear in (x, y, z); the multilinear cross
        // terms cancel in exactly matched pairs. Verify, then strip.
        SparsePoly4<LinearForm<S>> lin;
        for (const auto& [m, c] : det.terms()) {
            if (c.upper_magnitude() > kCancelRelTol * std::max(1e-300, shadow.det_floor(m)))
                throw internal_error("dixon: residual determinant is not linear in (x,y,z)");
            lin.add_term(m, c.linear_part());
        }

        auto check_remainder = [](const SparsePoly4<LinearForm<double>>& rem,
                                  const SparsePoly4<LinearForm<double>>& bound, const char* what) {
            for (const auto& [m, c] : rem.terms())
                if (c.magnitude() >
                    kCancelRelTol * detail::MagnitudeShadow::floor_of(bound, m))
                    throw internal_error(std::string("dixon: nonzero remainder dividing by ") +
                                         what);
        };
        auto div_u = divide_by_binomial(lin, Var4::u, Var4::alpha);
        check_remainder(div_u.remainder, shadow.rem_u, "(u - alpha)");
        auto div_v = divide_by_binomial(div_u.quotient, Var4::v, Var4::beta);
        check_remainder(div_v.remainder, shadow.rem_v, "(v - beta)");

        // Monomials whose coefficients cancel mathematically survive the
        // float division as dust; drop everything below its per-monomial
        // noise floor so the support matches the exact construction.
        for (const auto& [m, c] : div_v.quotient.terms())
            if (c.magnitude() >
                kCancelRelTol * detail::MagnitudeShadow::floor_of(shadow.delta, m))
                out.poly.add_term(m, c);
    } else {
        // exact scalars: cross terms and remainders must vanish identically
        SparsePoly4<LinearForm<S>> lin;
        for (const auto& [m, c] : det.terms()) {
            if (c.upper_magnitude() != 0.0)
                throw internal_error("dixon: residual determinant is not linear in (x,y,z)");
            lin.add_term(m, c.linear_part());
            out.coeff_scale = std::max(out.coeff_scale, c.magnitude());
        }
        auto check_zero = [](const SparsePoly4<LinearForm<S>>& rem, const char* what) {
            for (const auto& [m, c] : rem.terms())
                if (!c.is_zero())
                    throw internal_error(std::string("dixon: nonzero remainder dividing by ") +
                                         what);
        };
        auto div_u = divide_by_binomial(lin, Var4::u, Var4::alpha);
        check_zero(div_u.remainder, "(u - alpha)");
        auto div_v = divide_by_binomial(div_u.quotient, Var4::v, Var4::beta);
        check_zero(div_v.remainder, "(v - beta)");
        out.poly = std::move(div_v.quotient);
    }
    return out;
}

// ---------------------------------------------------------------------------

using Mono2 = std::pair<int, int>;

// Frozen monomial orderings for the matrix bases. The 5-element triangle
// lists follow the classical layout; the quad lists are graded lexicographic
// with u > v (alpha > beta), ending at u^3*v / alpha*beta^3.
inline std::vector<Mono2> cayley_row_basis(PatchKind k) {
    if (k == PatchKind::triangle) return {{0, 0}, {1, 0}, {0, 1}, {0, 2}, {1, 1}};
    return {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3}};
}

inline std::vector<Mono2> cayley_col_basis(PatchKind k) {
    if (k == PatchKind::triangle) return {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}};
    return {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {3, 0}, {2, 1}, {3, 1}};
}

inline std::string mono_string(Mono2 m, const char* n1, const char* n2) {
    std::string s;
    auto app = [&s](const char* n, int e) {
        if (e == 0) return;
        if (!s.empty()) s += "*";
        s += n;
        if (e > 1) s += "^" + std::to_string(e);
    };
    app(n1, m.first);
    app(n2, m.second);
    return s.empty() ? "1" : s;
}

template <class S>
struct CayleyMatrixT {
    PatchKind kind = PatchKind::triangle;
    int n = 0;
    std::vector<Mono2> row_basis;  // (alpha-exp, beta-exp)
    std::vector<Mono2> col_basis;  // (u-exp, v-exp)
    std::vector<LinearForm<S>> entries;  // n*n, row-major
    double coeff_scale = 0.0;

    const LinearForm<S>& at(int r, int c) const { return entries[r * n + c]; }
    LinearForm<S>& at(int r, int c) { return entries[r * n + c]; }
};

using CayleyMatrix = CayleyMatrixT<double>;

template <class S>
CayleyMatrixT<S> build_cayley_matrix(const DixonDeltaT<S>& delta) {
    CayleyMatrixT<S> cm;
    cm.kind = delta.kind;
    cm.row_basis = cayley_row_basis(delta.kind);
    cm.col_basis = cayley_col_basis(delta.kind);
    cm.n = static_cast<int>(cm.row_basis.size());
    cm.entries.assign(static_cast<std::size_t>(cm.n) * cm.n, LinearForm<S>{});
    cm.coeff_scale = delta.coeff_scale;

    auto index_of = [](const std::vector<Mono2>& basis, Mono2 m) {
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (basis[i] == m) return static_cast<int>(i);
        return -1;
    };
    for (const auto& [m, c] : delta.poly.terms()) {
        int col = index_of(cm.col_basis, {m.exp(Var4::u), m.exp(Var4::v)});
        int row = index_of(cm.row_basis, {m.exp(Var4::alpha), m.exp(Var4::beta)});
        if (col < 0 || row < 0)
            throw internal_error("dixon: delta monomial outside the declared matrix basis");
        cm.at(row, col) = c;
    }
    return cm;
}

template <class S = double>
CayleyMatrixT<S> build_cayley_matrix(const TriangleNet& net) {
    return build_cayley_matrix(build_dixon_delta(residual_system<S>(net)));
}

template <class S = double>
CayleyMatrixT<S> build_cayley_matrix(const QuadNet& net) {
    return build_cayley_matrix(build_dixon_delta(residual_system<S>(net)));
}

// Cells whose LinearForm cancels structurally (exactly zero in the exact
// scalar ring; below the cancellation threshold on the float path).
template <class S>
std::vector<std::pair<int, int>> structural_zero_cells(const CayleyMatrixT<S>& cm) {
    std::vector<std::pair<int, int>> cells;
    for (int r = 0; r < cm.n; ++r)
        for (int c = 0; c < cm.n; ++c) {
            bool zero;
            if constexpr (std::is_same_v<S, double>)
                zero = cm.at(r, c).magnitude() <= kCancelRelTol * cm.coeff_scale;
            else
                zero = cm.at(r, c).is_zero();
            if (zero) cells.emplace_back(r, c);
        }
    return cells;
}

// ---------------------------------------------------------------------------
// Dense real matrix produced by substituting a query point into every entry.

struct SmallMat {
    int n = 0;
    std::array<double, 64> a{};

    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * n + c]; }
    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * n + c]; }
};

inline SmallMat matrix_at(const CayleyMatrix& cm, const Point3& q) {
    SmallMat m;
    m.n = cm.n;
    for (int r = 0; r < cm.n; ++r)
        for (int c = 0; c < cm.n; ++c) m.at(r, c) = eval(cm.at(r, c), q);
    return m;
}

}  // namespace bqi
