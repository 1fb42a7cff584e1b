#pragma once

// LinearForm: a*x + b*y + c*z + d over a scalar ring S (double in production,
// Dyadic in the exact test mode). One Cayley matrix entry.

#include <cmath>
#include <type_traits>

#include "bqi/core.hpp"

namespace bqi {

template <class S>
struct LinearForm {
    S a{}, b{}, c{}, d{};

    friend LinearForm operator+(const LinearForm& p, const LinearForm& q) {
        return {p.a + q.a, p.b + q.b, p.c + q.c, p.d + q.d};
    }
    friend LinearForm operator-(const LinearForm& p, const LinearForm& q) {
        return {p.a - q.a, p.b - q.b, p.c - q.c, p.d - q.d};
    }
    LinearForm operator-() const { return {-a, -b, -c, -d}; }
    friend LinearForm operator*(const LinearForm& p, const S& s) {
        return {p.a * s, p.b * s, p.c * s, p.d * s};
    }

    bool is_zero() const {
        if constexpr (std::is_same_v<S, double>)
            return a == 0.0 && b == 0.0 && c == 0.0 && d == 0.0;
        else
            return a.is_zero() && b.is_zero() && c.is_zero() && d.is_zero();
    }

    // Largest component magnitude (approximate for exact scalars).
    double magnitude() const {
        if constexpr (std::is_same_v<S, double>) {
            return std::max(std::max(std::abs(a), std::abs(b)),
                            std::max(std::abs(c), std::abs(d)));
        } else {
            return std::max(std::max(std::abs(a.approx()), std::abs(b.approx())),
                            std::max(std::abs(c.approx()), std::abs(d.approx())));
        }
    }
};

inline double eval(const LinearForm<double>& f, const Point3& q) {
    return f.a * q.x + f.b * q.y + f.c * q.z + f.d;
}

}  // namespace bqi
