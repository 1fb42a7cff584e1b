#pragma once

// Sparse trivariate polynomials in (x, y, z): the expanded per-patch implicit
// equation. Evaluation uses a frozen nested-Horner walk (x outermost, then y,
// then z) shared between the direct evaluator and the straight-line-program
// emitter, so both produce the identical operation sequence.

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "bqi/core.hpp"

namespace bqi {

struct Exp3 {
    int i = 0, j = 0, k = 0;  // x, y, z exponents

    int total() const { return i + j + k; }

    // graded lexicographic: by total degree, then by (i, j, k)
    friend bool operator<(const Exp3& p, const Exp3& q) {
        if (p.total() != q.total()) return p.total() < q.total();
        if (p.i != q.i) return p.i < q.i;
        if (p.j != q.j) return p.j < q.j;
        return p.k < q.k;
    }
    friend bool operator==(const Exp3& p, const Exp3& q) {
        return p.i == q.i && p.j == q.j && p.k == q.k;
    }
};

struct TrivariatePoly {
    int max_degree = 0;            // declared bound, not the achieved degree
    std::map<Exp3, double> terms;  // canonical: no zero coefficients

    void add_term(Exp3 e, double c) {
        if (c == 0.0) return;
        auto [it, inserted] = terms.emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0.0) terms.erase(it);
        }
    }

    int total_degree() const {
        int d = 0;
        for (const auto& [e, c] : terms) d = std::max(d, e.total());
        return d;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& [e, c] : terms) m = std::max(m, std::abs(c));
        return m;
    }
};

// ---------------------------------------------------------------------------
// Nested-Horner walk. A sink provides:
//   Handle load(int axis);           axis 0/1/2 = x/y/z
//   Handle constant(double c);
//   Handle mul(Handle, Handle);
//   Handle add(Handle, Handle);
//   Handle finalize(Handle);
// The walk elides multiplications by an exact 1.0 leading coefficient (an
// IEEE no-op), which is what keeps x*y + z at one mul and one add.

namespace detail {

template <class Sink>
struct HornerWalk {
    using Handle = typename Sink::Handle;
    struct Val {
        Handle h{};
        bool is_one = false;
    };
    using ZChain = std::vector<std::pair<int, double>>;
    using YChain = std::vector<std::pair<int, ZChain>>;
    using XChain = std::vector<std::pair<int, YChain>>;

    Sink& sink;

    Val constant(double c) {
        if (c == 1.0) return {Handle{}, true};
        return {sink.constant(c), false};
    }
    Handle materialize(const Val& v) { return v.is_one ? sink.constant(1.0) : v.h; }
    Val mul(const Val& a, const Val& b) {
        if (a.is_one) return b;
        if (b.is_one) return a;
        return {sink.mul(a.h, b.h), false};
    }
    Val add(const Val& a, const Val& b) {
        return {sink.add(materialize(a), materialize(b)), false};
    }
    Val var_pow(Val acc, int axis, int e) {
        for (int t = 0; t < e; ++t) acc = mul(acc, Val{sink.load(axis), false});
        return acc;
    }

    // chain exponents are strictly descending
    template <class Part, class Eval>
    Val horner(int axis, const std::vector<std::pair<int, Part>>& chain, Eval&& eval_part) {
        Val acc = eval_part(chain.front().second);
        int prev = chain.front().first;
        for (std::size_t t = 1; t < chain.size(); ++t) {
            acc = var_pow(acc, axis, prev - chain[t].first);
            acc = add(acc, eval_part(chain[t].second));
            prev = chain[t].first;
        }
        return var_pow(acc, axis, prev);
    }

    Handle run(const TrivariatePoly& p) {
        if (p.terms.empty()) return sink.finalize(sink.constant(0.0));
        std::map<int, std::map<int, std::map<int, double>>> nest;
        for (const auto& [e, c] : p.terms) nest[e.i][e.j][e.k] = c;
        XChain xs;
        for (auto xit = nest.rbegin(); xit != nest.rend(); ++xit) {
            YChain ys;
            for (auto yit = xit->second.rbegin(); yit != xit->second.rend(); ++yit) {
                ZChain zs;
                for (auto zit = yit->second.rbegin(); zit != yit->second.rend(); ++zit)
                    zs.emplace_back(zit->first, zit->second);
                ys.emplace_back(yit->first, std::move(zs));
            }
            xs.emplace_back(xit->first, std::move(ys));
        }
        Val r = horner(0, xs, [&](const YChain& ys) {
            return horner(1, ys, [&](const ZChain& zs) {
                return horner(2, zs, [&](double c) { return constant(c); });
            });
        });
        return sink.finalize(materialize(r));
    }
};

}  // namespace detail

template <class Sink>
typename Sink::Handle horner_walk(const TrivariatePoly& p, Sink& sink) {
    detail::HornerWalk<Sink> walk{sink};
    return walk.run(p);
}

// Immediate evaluation: handles are plain doubles.
struct EvalSink {
    using Handle = double;
    double coord[3];

    Handle load(int axis) { return coord[axis]; }
    Handle constant(double c) { return c; }
    Handle mul(Handle a, Handle b) { return a * b; }
    Handle add(Handle a, Handle b) { return a + b; }
    Handle finalize(Handle h) { return h; }
};

inline double evaluate_poly(const TrivariatePoly& p, const Point3& q) {
    EvalSink sink{{q.x, q.y, q.z}};
    return horner_walk(p, sink);
}

}  // namespace bqi
