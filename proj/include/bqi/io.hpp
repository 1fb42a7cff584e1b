#pragma once

// JSON schemas for nets, Cayley matrices, trivariate polynomials and
// normalization transforms. Parsing is strict: unknown keys, wrong
// cardinalities and non-finite numbers are rejected.

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bqi/dixon.hpp"
#include "bqi/normalize.hpp"
#include "bqi/trivariate.hpp"

namespace bqi {

using json = nlohmann::ordered_json;
using NetVariant = std::variant<TriangleNet, QuadNet>;

namespace detail {

inline void expect_keys(const json& j, const std::vector<std::string>& keys, const char* what) {
    if (!j.is_object()) throw input_error(std::string(what) + ": expected a JSON object");
    for (const auto& k : keys)
        if (!j.contains(k)) throw input_error(std::string(what) + ": missing key '" + k + "'");
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const auto& key : keys) known = known || key == k;
        if (!known) throw input_error(std::string(what) + ": unknown key '" + k + "'");
    }
}

inline Point3 parse_point(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 3) throw input_error(what + ": expected a 3-array");
    double c[3];
    for (int i = 0; i < 3; ++i) {
        if (!j[i].is_number()) throw input_error(what + ": expected numbers");
        c[i] = j[i].get<double>();
    }
    try {
        return Point3(c[0], c[1], c[2]);
    } catch (const input_error&) {
        throw input_error(what + ": non-finite component");
    }
}

inline json point_json(const Point3& p) { return json::array({p.x, p.y, p.z}); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Control nets:
//   {"kind": "triangle", "points": {"b200": [x,y,z], ..., "b011": [...]}}
//   {"kind": "quad", "points": {"p00": [...], ..., "p22": [...]}}

inline NetVariant net_from_json(const json& j) {
    detail::expect_keys(j, {"kind", "points"}, "net");
    if (!j["kind"].is_string()) throw input_error("net: 'kind' must be a string");
    std::string kind = j["kind"].get<std::string>();
    const json& pts = j["points"];
    if (kind == "triangle") {
        detail::expect_keys(pts, {"b200", "b020", "b002", "b110", "b101", "b011"}, "net.points");
        TriangleNet n{detail::parse_point(pts["b200"], "b200"),
                      detail::parse_point(pts["b020"], "b020"),
                      detail::parse_point(pts["b002"], "b002"),
                      detail::parse_point(pts["b110"], "b110"),
                      detail::parse_point(pts["b101"], "b101"),
                      detail::parse_point(pts["b011"], "b011")};
        return n;
    }
    if (kind == "quad") {
        std::vector<std::string> keys;
        for (int i = 0; i < 3; ++i)
            for (int j2 = 0; j2 < 3; ++j2) keys.push_back("p" + std::to_string(i) + std::to_string(j2));
        detail::expect_keys(pts, keys, "net.points");
        QuadNet n;
        for (int i = 0; i < 3; ++i)
            for (int j2 = 0; j2 < 3; ++j2) {
                std::string key = "p" + std::to_string(i) + std::to_string(j2);
                n.p[i][j2] = detail::parse_point(pts[key], key);
            }
        return n;
    }
    throw input_error("net: kind must be 'triangle' or 'quad'");
}

inline NetVariant net_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("net: invalid JSON: ") + e.what());
    }
    return net_from_json(j);
}

inline json net_to_json(const TriangleNet& n) {
    json pts;
    pts["b200"] = detail::point_json(n.b200);
    pts["b020"] = detail::point_json(n.b020);
    pts["b002"] = detail::point_json(n.b002);
    pts["b110"] = detail::point_json(n.b110);
    pts["b101"] = detail::point_json(n.b101);
    pts["b011"] = detail::point_json(n.b011);
    return json{{"kind", "triangle"}, {"points", pts}};
}

inline json net_to_json(const QuadNet& n) {
    json pts;
    for (int i = 0; i < 3; ++i)
        for (int j2 = 0; j2 < 3; ++j2)
            pts["p" + std::to_string(i) + std::to_string(j2)] = detail::point_json(n.p[i][j2]);
    return json{{"kind", "quad"}, {"points", pts}};
}

// ---------------------------------------------------------------------------
// Cayley matrix:
//   {"n": 5, "rows": [...monomials...], "cols": [...], "entries": n x n of [A,B,C,D]}

inline json cayley_to_json(const CayleyMatrix& cm) {
    json rows = json::array(), cols = json::array(), entries = json::array();
    for (auto m : cm.row_basis) rows.push_back(mono_string(m, "alpha", "beta"));
    for (auto m : cm.col_basis) cols.push_back(mono_string(m, "u", "v"));
    for (int r = 0; r < cm.n; ++r) {
        json row = json::array();
        for (int c = 0; c < cm.n; ++c) {
            const auto& e = cm.at(r, c);
            row.push_back(json::array({e.a, e.b, e.c, e.d}));
        }
        entries.push_back(row);
    }
    return json{{"n", cm.n}, {"rows", rows}, {"cols", cols}, {"entries", entries}};
}

inline CayleyMatrix cayley_from_json(const json& j) {
    detail::expect_keys(j, {"n", "rows", "cols", "entries"}, "cayley");
    if (!j["n"].is_number_integer()) throw input_error("cayley: 'n' must be an integer");
    int n = j["n"].get<int>();
    if (n != 5 && n != 8) throw input_error("cayley: order must be 5 or 8");
    CayleyMatrix cm;
    cm.kind = n == 5 ? PatchKind::triangle : PatchKind::quad;
    cm.n = n;
    cm.row_basis = cayley_row_basis(cm.kind);
    cm.col_basis = cayley_col_basis(cm.kind);
    for (int r = 0; r < n; ++r)
        if (j["rows"].at(r).get<std::string>() != mono_string(cm.row_basis[r], "alpha", "beta"))
            throw input_error("cayley: unexpected row basis");
    for (int c = 0; c < n; ++c)
        if (j["cols"].at(c).get<std::string>() != mono_string(cm.col_basis[c], "u", "v"))
            throw input_error("cayley: unexpected column basis");
    const json& entries = j["entries"];
    if (!entries.is_array() || static_cast<int>(entries.size()) != n)
        throw input_error("cayley: entries must be an n x n array");
    cm.entries.assign(static_cast<std::size_t>(n) * n, {});
    double mx = 0.0;
    for (int r = 0; r < n; ++r) {
        const json& row = entries.at(r);
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw input_error("cayley: entries must be an n x n array");
        for (int c = 0; c < n; ++c) {
            const json& e = row.at(c);
            if (!e.is_array() || e.size() != 4) throw input_error("cayley: entry must be [A,B,C,D]");
            cm.at(r, c) = {e[0].get<double>(), e[1].get<double>(), e[2].get<double>(),
                           e[3].get<double>()};
            mx = std::max(mx, cm.at(r, c).magnitude());
        }
    }
    // Construction scales are not part of the wire format. Self-scale the
    // loaded matrix: exact-zero matrices are still detected as degenerate,
    // anything else is trusted.
    cm.coeff_scale = mx;

    return cm;
}

// ---------------------------------------------------------------------------
// Trivariate polynomial:
//   {"max_degree": d, "terms": [[i,j,k,c], ...]} in graded-lex order

inline json poly_to_json(const TrivariatePoly& p) {
    json terms = json::array();
    for (const auto& [e, c] : p.terms) terms.push_back(json::array({e.i, e.j, e.k, c}));
    return json{{"max_degree", p.max_degree}, {"terms", terms}};
}

inline TrivariatePoly poly_from_json(const json& j) {
    detail::expect_keys(j, {"max_degree", "terms"}, "poly");
    if (!j["max_degree"].is_number_integer()) throw input_error("poly: bad max_degree");
    TrivariatePoly p;
    p.max_degree = j["max_degree"].get<int>();
    if (p.max_degree < 0 || p.max_degree > 64) throw input_error("poly: bad max_degree");
    if (!j["terms"].is_array()) throw input_error("poly: terms must be an array");
    for (const auto& t : j["terms"]) {
        if (!t.is_array() || t.size() != 4) throw input_error("poly: term must be [i,j,k,c]");
        for (int i = 0; i < 3; ++i)
            if (!t[i].is_number_integer() || t[i].get<int>() < 0)
                throw input_error("poly: exponents must be non-negative integers");
        Exp3 e{t[0].get<int>(), t[1].get<int>(), t[2].get<int>()};
        double c = t[3].get<double>();
        if (e.total() > p.max_degree) throw input_error("poly: term exceeds max_degree");
        if (c == 0.0) throw input_error("poly: zero coefficient is not canonical");
        if (p.terms.count(e)) throw input_error("poly: duplicate term");
        p.terms.emplace(e, c);
    }
    return p;
}

inline TrivariatePoly poly_from_json_text(const std::string& text) {
    try {
        return poly_from_json(json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("poly: invalid JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Normalization transform: {"r1": [9], "r2": [9], "c1": [3], "s": number}

inline json transform_to_json(const NormalizationTransform& t) {
    json r1 = json::array(), r2 = json::array();
    for (double v : t.r1.a) r1.push_back(v);
    for (double v : t.r2.a) r2.push_back(v);
    return json{{"r1", r1}, {"r2", r2}, {"c1", detail::point_json(t.c1)}, {"s", t.s}};
}

inline NormalizationTransform transform_from_json(const json& j) {
    detail::expect_keys(j, {"r1", "r2", "c1", "s"}, "transform");
    NormalizationTransform t;
    auto mat = [](const json& a, const char* what) {
        if (!a.is_array() || a.size() != 9)
            throw input_error(std::string(what) + ": expected a 9-array");
        Mat3 m;
        for (int i = 0; i < 9; ++i) m.a[static_cast<std::size_t>(i)] = a[i].get<double>();
        return m;
    };
    t.r1 = mat(j["r1"], "transform.r1");
    t.r2 = mat(j["r2"], "transform.r2");
    t.c1 = detail::parse_point(j["c1"], "transform.c1");
    if (!j["s"].is_number()) throw input_error("transform: 's' must be a number");
    t.s = j["s"].get<double>();
    if (!(t.s > 0.0)) throw input_error("transform: scale must be positive");
    return t;
}

}  // namespace bqi
