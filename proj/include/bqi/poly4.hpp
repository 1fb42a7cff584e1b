#pragma once

// Sparse polynomials in the four elimination variables (u, v, alpha, beta)
// with ring-valued coefficients, plus the multilinear (x,y,z) coefficient
// ring needed while the 3x3 residual determinant is being expanded.

#include <cstdint>
#include <map>

#include "bqi/linear_form.hpp"

namespace bqi {

// Variable slots of the elimination polynomial ring.
enum class Var4 : int { u = 0, v = 1, alpha = 2, beta = 3 };

struct Mono4 {
    std::uint8_t e[4] = {0, 0, 0, 0};  // exponents of u, v, alpha, beta

    std::uint32_t key() const {
        return (std::uint32_t(e[0]) << 24) | (std::uint32_t(e[1]) << 16) |
               (std::uint32_t(e[2]) << 8) | std::uint32_t(e[3]);
    }
    static Mono4 from_key(std::uint32_t k) {
        Mono4 m;
        m.e[0] = std::uint8_t(k >> 24);
        m.e[1] = std::uint8_t(k >> 16);
        m.e[2] = std::uint8_t(k >> 8);
        m.e[3] = std::uint8_t(k);
        return m;
    }
    int exp(Var4 s) const { return e[static_cast<int>(s)]; }

    friend bool operator<(const Mono4& p, const Mono4& q) { return p.key() < q.key(); }
    friend bool operator==(const Mono4& p, const Mono4& q) { return p.key() == q.key(); }

    friend Mono4 operator*(Mono4 p, const Mono4& q) {
        for (int i = 0; i < 4; ++i) p.e[i] = std::uint8_t(p.e[i] + q.e[i]);
        return p;
    }
};

template <class C>
class SparsePoly4 {
public:
    using TermMap = std::map<Mono4, C>;

    void add_term(const Mono4& m, const C& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second = it->second + c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    const C* find(const Mono4& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? nullptr : &it->second;
    }

    friend SparsePoly4 operator+(const SparsePoly4& p, const SparsePoly4& q) {
        SparsePoly4 r = p;
        for (const auto& [m, c] : q.terms_) r.add_term(m, c);
        return r;
    }

    friend SparsePoly4 operator-(const SparsePoly4& p, const SparsePoly4& q) {
        SparsePoly4 r = p;
        for (const auto& [m, c] : q.terms_) r.add_term(m, -c);
        return r;
    }

    friend SparsePoly4 operator*(const SparsePoly4& p, const SparsePoly4& q) {
        SparsePoly4 r;
        for (const auto& [mp, cp] : p.terms_)
            for (const auto& [mq, cq] : q.terms_) r.add_term(mp * mq, cp * cq);
        return r;
    }

    // Multiply by a single variable: pure exponent shift, no rounding.
    SparsePoly4 shifted(Var4 s) const {
        SparsePoly4 r;
        for (const auto& [m, c] : terms_) {
            Mono4 n = m;
            n.e[static_cast<int>(s)] = std::uint8_t(n.e[static_cast<int>(s)] + 1);
            r.terms_.emplace(n, c);
        }
        return r;
    }

    int max_exp(Var4 s) const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.exp(s));
        return d;
    }

    double max_magnitude() const {
        double mx = 0.0;
        for (const auto& [m, c] : terms_) mx = std::max(mx, c.magnitude());
        return mx;
    }

private:
    TermMap terms_;
};

// ---------------------------------------------------------------------------
// Coefficient ring for the residual determinant: values multilinear in
// (x, y, z). Component index is a bitmask (bit0 = x, bit1 = y, bit2 = z).
// Determinant expansion never multiplies two entries from the same residual
// column, so products with overlapping variables cannot carry nonzero
// coefficients; that structural fact is asserted, not assumed.

template <class S>
struct TriLinear {
    S comp[8] = {};

    static TriLinear from(const LinearForm<S>& f) {
        TriLinear t;
        t.comp[0] = f.d;
        t.comp[1] = f.a;
        t.comp[2] = f.b;
        t.comp[4] = f.c;
        return t;
    }

    bool is_zero() const {
        for (const auto& c : comp)
            if (!scalar_is_zero(c)) return false;
        return true;
    }

    TriLinear operator-() const {
        TriLinear t;
        for (int i = 0; i < 8; ++i) t.comp[i] = -comp[i];
        return t;
    }

    friend TriLinear operator+(const TriLinear& p, const TriLinear& q) {
        TriLinear t;
        for (int i = 0; i < 8; ++i) t.comp[i] = p.comp[i] + q.comp[i];
        return t;
    }

    friend TriLinear operator*(const TriLinear& p, const TriLinear& q) {
        TriLinear t;
        for (int i = 0; i < 8; ++i) {
            if (scalar_is_zero(p.comp[i])) continue;
            for (int j = 0; j < 8; ++j) {
                if (scalar_is_zero(q.comp[j])) continue;
                if (i & j)
                    throw internal_error("TriLinear: product outside the multilinear basis");
                t.comp[i | j] = t.comp[i | j] + p.comp[i] * q.comp[j];
            }
        }
        return t;
    }

    double magnitude() const {
        double mx = 0.0;
        for (const auto& c : comp) mx = std::max(mx, scalar_abs(c));
        return mx;
    }

    // Magnitude of the quadratic-and-above components, which must cancel.
    double upper_magnitude() const {
        double mx = 0.0;
        for (int i : {3, 5, 6, 7}) mx = std::max(mx, scalar_abs(comp[i]));
        return mx;
    }

    LinearForm<S> linear_part() const { return {comp[1], comp[2], comp[4], comp[0]}; }

private:
    static bool scalar_is_zero(const S& v) {
        if constexpr (std::is_same_v<S, double>)
            return v == 0.0;
        else
            return v.is_zero();
    }
    static double scalar_abs(const S& v) {
        if constexpr (std::is_same_v<S, double>)
            return std::abs(v);
        else
            return std::abs(v.approx());
    }
};

// ---------------------------------------------------------------------------
// Synthetic division of p by (top - root), where top and root are variable
// slots (u - alpha, then v - beta). The divisor is monic in `top`, so the
// quotient needs only additions and exponent shifts; coefficients stay in
// the LinearForm ring.

template <class C>
struct DivisionResult {
    SparsePoly4<C> quotient;
    SparsePoly4<C> remainder;
};

template <class C>
DivisionResult<C> divide_by_binomial(const SparsePoly4<C>& p, Var4 top, Var4 root) {
    int d = p.max_exp(top);
    // split into coefficients by top-exponent (exponent removed)
    std::map<int, SparsePoly4<C>> parts;
    for (const auto& [m, c] : p.terms()) {
        Mono4 n = m;
        int k = n.e[static_cast<int>(top)];
        n.e[static_cast<int>(top)] = 0;
        parts[k].add_term(n, c);
    }
    DivisionResult<C> out;
    if (d == 0) {
        out.remainder = p;
        return out;
    }
    SparsePoly4<C> carry = parts[d];
    for (int k = d - 1; k >= 0; --k) {
        // quotient coefficient of top^k is the incoming carry
        for (const auto& [m, c] : carry.terms()) {
            Mono4 n = m;
            n.e[static_cast<int>(top)] = std::uint8_t(k);
            out.quotient.add_term(n, c);
        }
        carry = parts[k] + carry.shifted(root);
    }
    out.remainder = carry;
    return out;
}

}  // namespace bqi
