#pragma once

// Numeric evaluation of the implicit function as a Cayley-matrix determinant,
// and the point classification built on it.

#include <cmath>

#include "bqi/dixon.hpp"

namespace bqi {

// LU factorization with partial pivoting (largest magnitude, lowest row index
// on ties). Deterministic: identical inputs give bit-identical results.
inline double det_lu(SmallMat m) {
    double sign = 1.0;
    for (int k = 0; k < m.n; ++k) {
        int piv = k;
        double best = std::abs(m.at(k, k));
        for (int i = k + 1; i < m.n; ++i) {
            double v = std::abs(m.at(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < m.n; ++j) std::swap(m.at(k, j), m.at(piv, j));
            sign = -sign;
        }
        double d = m.at(k, k);
        for (int i = k + 1; i < m.n; ++i) {
            double f = m.at(i, k) / d;
            m.at(i, k) = 0.0;
            for (int j = k + 1; j < m.n; ++j) m.at(i, j) -= f * m.at(k, j);
        }
    }
    double det = sign;
    for (int k = 0; k < m.n; ++k) det *= m.at(k, k);
    return det;
}

// Product of row max-norms: the Hadamard-style magnitude of the determinant,
// used as the relative tolerance scale.
inline double row_norm_product(const SmallMat& m) {
    double prod = 1.0;
    for (int r = 0; r < m.n; ++r) {
        double mx = 0.0;
        for (int c = 0; c < m.n; ++c) mx = std::max(mx, std::abs(m.at(r, c)));
        prod *= mx;
    }
    return prod;
}

inline double det_eval(const CayleyMatrix& cm, const Point3& q) {
    return det_lu(matrix_at(cm, q));
}

// An identically-zero Cayley matrix: the resultant construction degenerated
// (coincident or collinear nets and similar). The per-monomial dust cleanup
// already zeroes every entry of such a construction exactly, so this is a
// literal emptiness check; ill-conditioned but nonzero constructions (for
// example nets offset far from the origin) deliberately pass through and
// produce the garbage values they produce.
template <class S>
bool is_structurally_zero(const CayleyMatrixT<S>& cm) {
    for (const auto& e : cm.entries)
        if (!e.is_zero()) return false;
    return true;
}

struct ClassificationResult {
    enum class Verdict { on_surface, side_positive, side_negative };

    double value = 0.0;
    Verdict verdict = Verdict::on_surface;
    double tolerance_scale = 0.0;
};

inline const char* to_string(ClassificationResult::Verdict v) {
    switch (v) {
        case ClassificationResult::Verdict::on_surface: return "on-surface";
        case ClassificationResult::Verdict::side_positive: return "side-positive";
        default: return "side-negative";
    }
}

// Which side of the surface q lies on. The sign labels are an arbitrary but
// deterministic orientation; only same-side/opposite-side comparisons are
// meaningful to callers.
inline ClassificationResult classify(const CayleyMatrix& cm, const Point3& q,
                                     double rel_tol = 1e-9) {
    if (!(rel_tol > 0.0)) throw input_error("classify: rel_tol must be positive");
    if (is_structurally_zero(cm))
        throw degenerate_error("classify: identically zero Cayley determinant");
    SmallMat m = matrix_at(cm, q);
    double scale = rel_tol * row_norm_product(m);
    if (scale == 0.0) throw degenerate_error("classify: zero tolerance scale");
    ClassificationResult r;
    r.value = det_lu(m);
    r.tolerance_scale = scale;
    if (std::abs(r.value) <= scale)
        r.verdict = ClassificationResult::Verdict::on_surface;
    else
        r.verdict = r.value > 0.0 ? ClassificationResult::Verdict::side_positive
                                  : ClassificationResult::Verdict::side_negative;
    return r;
}

}  // namespace bqi
