#pragma once

// Expansion of the Cayley determinant into an explicit TrivariatePoly: a
// Laplace expansion over polynomial-valued entries with minors memoized by
// column subset, which avoids polynomial division entirely. Buffers are dense
// over packed exponents; the result is converted back to canonical sparse
// form with a cancellation-dust cleanup.

#include <cstdint>
#include <vector>

#include "bqi/dixon.hpp"
#include "bqi/numeric.hpp"
#include "bqi/trivariate.hpp"

namespace bqi {

// Dust threshold: after expansion, coefficients at or below this fraction of
// the largest coefficient are float cancellation residue and are dropped.
inline constexpr double kExpandCleanupRelTol = 1e-12;

namespace detail {

// Dense coefficient buffer over exponents packed as i + B*j + B*B*k where
// B = n + 1 (total degree of every minor at level k is at most n - k).
struct DensePoly3 {
    std::vector<double> c;

    static DensePoly3 zeros(int base) {
        DensePoly3 p;
        p.c.assign(static_cast<std::size_t>(base) * base * base, 0.0);
        return p;
    }
};

// out += entry * minor, where entry = a*x + b*y + c*z + d.
inline void accumulate_product(DensePoly3& out, const LinearForm<double>& entry,
                               const DensePoly3& minor, int base, double sign) {
    const std::size_t bx = 1, by = static_cast<std::size_t>(base),
                      bz = static_cast<std::size_t>(base) * base;
    const double a = sign * entry.a, b = sign * entry.b, c = sign * entry.c, d = sign * entry.d;
    for (std::size_t idx = 0; idx < minor.c.size(); ++idx) {
        double v = minor.c[idx];
        if (v == 0.0) continue;
        if (d != 0.0) out.c[idx] += d * v;
        if (a != 0.0) out.c[idx + bx] += a * v;
        if (b != 0.0) out.c[idx + by] += b * v;
        if (c != 0.0) out.c[idx + bz] += c * v;
    }
}

}  // namespace detail

// Determinant of the Cayley matrix over TrivariatePoly-valued entries.
// Throws degenerate_error when the determinant is identically zero (the
// resultant construction broke down for this net).
inline TrivariatePoly expand_resultant(const CayleyMatrix& cm) {
    if (is_structurally_zero(cm))
        throw degenerate_error("expand_resultant: identically zero Cayley determinant");

    const int n = cm.n;
    const int base = n + 1;
    const std::uint32_t full = (1u << n) - 1u;

    // minors over rows k..n-1 and each column subset of size n-k, built from
    // the bottom row upward
    std::vector<detail::DensePoly3> prev(1), cur;
    prev[0] = detail::DensePoly3::zeros(base);
    prev[0].c[0] = 1.0;  // det of the empty matrix
    std::vector<std::uint32_t> prev_masks = {0};

    for (int k = n - 1; k >= 0; --k) {
        const int size = n - k;
        cur.clear();
        std::vector<std::uint32_t> cur_masks;
        std::vector<int> index_of(full + 1, -1);
        for (std::size_t t = 0; t < prev_masks.size(); ++t) index_of[prev_masks[t]] = static_cast<int>(t);

        for (std::uint32_t mask = 0; mask <= full; ++mask) {
            if (std::popcount(mask) != size) continue;
            detail::DensePoly3 acc = detail::DensePoly3::zeros(base);
            double sign = 1.0;
            for (int col = 0; col < n; ++col) {
                if (!(mask & (1u << col))) continue;
                const detail::DensePoly3& minor = prev[index_of[mask & ~(1u << col)]];
                accumulate_product(acc, cm.at(k, col), minor, base, sign);
                sign = -sign;
            }
            cur_masks.push_back(mask);
            cur.push_back(std::move(acc));
        }
        prev = std::move(cur);
        prev_masks = std::move(cur_masks);
    }

    const detail::DensePoly3& det = prev[0];
    double max_abs = 0.0;
    for (double v : det.c) max_abs = std::max(max_abs, std::abs(v));

    TrivariatePoly out;
    out.max_degree = cm.kind == PatchKind::triangle ? 5 : 8;
    for (int k = 0; k < base; ++k)
        for (int j = 0; j + k < base; ++j)
            for (int i = 0; i + j + k < base; ++i) {
                double v = det.c[static_cast<std::size_t>(i) + static_cast<std::size_t>(base) * j +
                                 static_cast<std::size_t>(base) * base * k];
                if (v == 0.0 || std::abs(v) <= kExpandCleanupRelTol * max_abs) continue;
                out.add_term({i, j, k}, v);
            }

    if (out.terms.empty())
        throw degenerate_error("expand_resultant: identically zero resultant");
    if (out.total_degree() > out.max_degree)
        throw internal_error("expand_resultant: degree bound violated");
    return out;
}

}  // namespace bqi
