#pragma once

// Exact dyadic arithmetic (m * 2^e with an arbitrary-precision mantissa).
// Every IEEE double is dyadic, and the resultant construction only adds,
// subtracts and multiplies, so this ring suffices to rerun the whole Cayley
// build exactly. Used by the tests to validate the float path; the
// production path stays 64-bit float.

#include <cmath>
#include <compare>
#include <cstdint>
#include <vector>

#include "bqi/core.hpp"

namespace bqi {

// Sign-magnitude big integer over 32-bit limbs, little-endian.
class BigInt {
public:
    BigInt() = default;
    BigInt(std::int64_t v) {
        neg_ = v < 0;
        std::uint64_t m = neg_ ? -static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v);
        while (m) {
            limbs_.push_back(static_cast<std::uint32_t>(m));
            m >>= 32;
        }
    }

    bool is_zero() const { return limbs_.empty(); }
    bool negative() const { return neg_; }

    friend BigInt operator-(BigInt a) {
        if (!a.is_zero()) a.neg_ = !a.neg_;
        return a;
    }

    friend BigInt operator+(const BigInt& a, const BigInt& b) {
        if (a.neg_ == b.neg_) {
            BigInt r;
            r.limbs_ = add_mag(a.limbs_, b.limbs_);
            r.neg_ = a.neg_;
            r.trim();
            return r;
        }
        int c = cmp_mag(a.limbs_, b.limbs_);
        BigInt r;
        if (c == 0) return r;
        if (c > 0) {
            r.limbs_ = sub_mag(a.limbs_, b.limbs_);
            r.neg_ = a.neg_;
        } else {
            r.limbs_ = sub_mag(b.limbs_, a.limbs_);
            r.neg_ = b.neg_;
        }
        r.trim();
        return r;
    }

    friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

    friend BigInt operator*(const BigInt& a, const BigInt& b) {
        BigInt r;
        if (a.is_zero() || b.is_zero()) return r;
        r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
            std::uint64_t carry = 0;
            for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
                std::uint64_t t = static_cast<std::uint64_t>(a.limbs_[i]) * b.limbs_[j] +
                                  r.limbs_[i + j] + carry;
                r.limbs_[i + j] = static_cast<std::uint32_t>(t);
                carry = t >> 32;
            }
            r.limbs_[i + b.limbs_.size()] += static_cast<std::uint32_t>(carry);
        }
        r.neg_ = a.neg_ != b.neg_;
        r.trim();
        return r;
    }

    friend bool operator==(const BigInt& a, const BigInt& b) {
        return a.neg_ == b.neg_ && a.limbs_ == b.limbs_;
    }

    BigInt shifted_left(unsigned bits) const {
        if (is_zero() || bits == 0) return *this;
        BigInt r;
        unsigned words = bits / 32, rem = bits % 32;
        r.limbs_.assign(limbs_.size() + words + 1, 0);
        for (std::size_t i = 0; i < limbs_.size(); ++i) {
            std::uint64_t t = static_cast<std::uint64_t>(limbs_[i]) << rem;
            r.limbs_[i + words] |= static_cast<std::uint32_t>(t);
            r.limbs_[i + words + 1] |= static_cast<std::uint32_t>(t >> 32);
        }
        r.neg_ = neg_;
        r.trim();
        return r;
    }

    // Number of trailing zero bits; only valid for nonzero values.
    unsigned trailing_zero_bits() const {
        unsigned n = 0;
        for (std::size_t i = 0; i < limbs_.size(); ++i) {
            if (limbs_[i] == 0) {
                n += 32;
                continue;
            }
            std::uint32_t w = limbs_[i];
            while (!(w & 1)) {
                ++n;
                w >>= 1;
            }
            break;
        }
        return n;
    }

    BigInt shifted_right(unsigned bits) const {
        if (is_zero() || bits == 0) return *this;
        BigInt r;
        unsigned words = bits / 32, rem = bits % 32;
        if (words >= limbs_.size()) return r;
        r.limbs_.assign(limbs_.size() - words, 0);
        for (std::size_t i = 0; i < r.limbs_.size(); ++i) {
            std::uint64_t hi = (i + words + 1 < limbs_.size()) ? limbs_[i + words + 1] : 0;
            std::uint64_t t = (hi << 32) | limbs_[i + words];
            r.limbs_[i] = static_cast<std::uint32_t>(t >> rem);
        }
        r.neg_ = neg_;
        r.trim();
        return r;
    }

    double approx() const {
        double v = 0.0;
        for (std::size_t i = limbs_.size(); i-- > 0;) v = v * 4294967296.0 + limbs_[i];
        return neg_ ? -v : v;
    }

    unsigned bit_length() const {
        if (limbs_.empty()) return 0;
        std::uint32_t top = limbs_.back();
        unsigned n = static_cast<unsigned>(limbs_.size() - 1) * 32;
        while (top) {
            ++n;
            top >>= 1;
        }
        return n;
    }

private:
    std::vector<std::uint32_t> limbs_;
    bool neg_ = false;

    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
        if (limbs_.empty()) neg_ = false;
    }

    static std::vector<std::uint32_t> add_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
        const auto& big = a.size() >= b.size() ? a : b;
        const auto& small = a.size() >= b.size() ? b : a;
        std::vector<std::uint32_t> r(big.size() + 1, 0);
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < big.size(); ++i) {
            std::uint64_t t = carry + big[i] + (i < small.size() ? small[i] : 0);
            r[i] = static_cast<std::uint32_t>(t);
            carry = t >> 32;
        }
        r[big.size()] = static_cast<std::uint32_t>(carry);
        return r;
    }

    // requires |a| >= |b|
    static std::vector<std::uint32_t> sub_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
        std::vector<std::uint32_t> r(a.size(), 0);
        std::int64_t borrow = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            std::int64_t t = static_cast<std::int64_t>(a[i]) - borrow -
                             (i < b.size() ? static_cast<std::int64_t>(b[i]) : 0);
            borrow = 0;
            if (t < 0) {
                t += (std::int64_t{1} << 32);
                borrow = 1;
            }
            r[i] = static_cast<std::uint32_t>(t);
        }
        return r;
    }

    static int cmp_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (std::size_t i = a.size(); i-- > 0;)
            if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        return 0;
    }
};

// Exact value m * 2^e. Normalized so m is odd (or zero).
class Dyadic {
public:
    Dyadic() = default;
    Dyadic(int v) : m_(v) { normalize(); }

    static Dyadic from_double(double v) {
        if (!std::isfinite(v)) throw input_error("Dyadic: non-finite double");
        Dyadic r;
        if (v == 0.0) return r;
        int exp = 0;
        double frac = std::frexp(v, &exp);  // v = frac * 2^exp, |frac| in [0.5, 1)
        double scaled = std::ldexp(frac, 53);
        r.m_ = BigInt(static_cast<std::int64_t>(scaled));
        r.e_ = exp - 53;
        r.normalize();
        return r;
    }

    bool is_zero() const { return m_.is_zero(); }

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        Dyadic r;
        if (a.e_ <= b.e_) {
            r.m_ = a.m_ + b.m_.shifted_left(static_cast<unsigned>(b.e_ - a.e_));
            r.e_ = a.e_;
        } else {
            r.m_ = b.m_ + a.m_.shifted_left(static_cast<unsigned>(a.e_ - b.e_));
            r.e_ = b.e_;
        }
        r.normalize();
        return r;
    }

    friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
    friend Dyadic operator-(Dyadic a) {
        a.m_ = -a.m_;
        return a;
    }

    friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
        Dyadic r;
        r.m_ = a.m_ * b.m_;
        r.e_ = a.e_ + b.e_;
        r.normalize();
        return r;
    }

    friend bool operator==(const Dyadic& a, const Dyadic& b) {
        return a.e_ == b.e_ && a.m_ == b.m_;
    }

    double approx() const { return std::ldexp(m_.approx(), static_cast<int>(e_)); }

private:
    BigInt m_;
    std::int64_t e_ = 0;

    void normalize() {
        if (m_.is_zero()) {
            e_ = 0;
            return;
        }
        unsigned tz = m_.trailing_zero_bits();
        if (tz) {
            m_ = m_.shifted_right(tz);
            e_ += tz;
        }
    }
};

}  // namespace bqi
