#pragma once

// Straight-line programs: branch- and loop-free instruction lists computing a
// TrivariatePoly through exactly the evaluator's operation sequence, so an
// interpreted program is bit-identical to evaluate_poly. Includes the
// line-oriented text format.
//
// Text grammar (one op per line, registers numbered in definition order):
//   slp v1
//   consts <N>
//   c<i> = <double>                    (N lines)
//   ops <M>
//   r<i> = load x|y|z
//   r<i> = const c<j>
//   r<i> = mul <operand> <operand>     (operand: r<j> or c<j>)
//   r<i> = add <operand> <operand>
//   out r<k>

#include <cstdint>
#include <cstring>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bqi/trivariate.hpp"

namespace bqi {

// Operand: register index (>= 0) or constant-table reference (encoded < 0).
struct SlpOperand {
    int v = 0;

    static SlpOperand reg(int r) { return {r}; }
    static SlpOperand cref(int c) { return {-1 - c}; }
    bool is_const() const { return v < 0; }
    int index() const { return v < 0 ? -1 - v : v; }
};

struct SlpOp {
    enum class Kind { load, constant, add, mul };
    Kind kind = Kind::load;
    int axis = 0;       // load: 0/1/2 = x/y/z
    int const_index = 0;  // constant
    SlpOperand lhs, rhs;  // add/mul
};

struct StraightLineProgram {
    std::vector<double> consts;
    std::vector<SlpOp> ops;  // op t defines register r<t>
    int out_reg = 0;

    int mul_count() const {
        int c = 0;
        for (const auto& op : ops) c += op.kind == SlpOp::Kind::mul;
        return c;
    }
    int add_count() const {
        int c = 0;
        for (const auto& op : ops) c += op.kind == SlpOp::Kind::add;
        return c;
    }
};

// ---------------------------------------------------------------------------

namespace detail {

struct EmitSink {
    using Handle = SlpOperand;

    StraightLineProgram prog;
    std::map<std::uint64_t, int> const_index;  // keyed by bit pattern
    int load_reg[3] = {-1, -1, -1};

    int intern_const(double c) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(c));
        std::memcpy(&bits, &c, sizeof(bits));
        auto [it, inserted] = const_index.emplace(bits, static_cast<int>(prog.consts.size()));
        if (inserted) prog.consts.push_back(c);
        return it->second;
    }

    Handle load(int axis) {
        if (load_reg[axis] < 0) {
            SlpOp op;
            op.kind = SlpOp::Kind::load;
            op.axis = axis;
            load_reg[axis] = static_cast<int>(prog.ops.size());
            prog.ops.push_back(op);
        }
        return SlpOperand::reg(load_reg[axis]);
    }

    Handle constant(double c) { return SlpOperand::cref(intern_const(c)); }

    Handle emit(SlpOp::Kind kind, Handle a, Handle b) {
        SlpOp op;
        op.kind = kind;
        op.lhs = a;
        op.rhs = b;
        prog.ops.push_back(op);
        return SlpOperand::reg(static_cast<int>(prog.ops.size()) - 1);
    }

    Handle mul(Handle a, Handle b) { return emit(SlpOp::Kind::mul, a, b); }
    Handle add(Handle a, Handle b) { return emit(SlpOp::Kind::add, a, b); }

    // The program must end in a register; a bare constant result becomes one
    // explicit const op.
    Handle finalize(Handle h) {
        if (!h.is_const()) return h;
        SlpOp op;
        op.kind = SlpOp::Kind::constant;
        op.const_index = h.index();
        prog.ops.push_back(op);
        return SlpOperand::reg(static_cast<int>(prog.ops.size()) - 1);
    }
};

}  // namespace detail

inline StraightLineProgram emit_slp(const TrivariatePoly& p) {
    detail::EmitSink sink;
    SlpOperand out = horner_walk(p, sink);
    sink.prog.out_reg = out.index();
    return sink.prog;
}

inline double run_slp(const StraightLineProgram& prog, const Point3& q) {
    std::vector<double> reg(prog.ops.size(), 0.0);
    auto operand = [&](SlpOperand o) { return o.is_const() ? prog.consts[o.index()] : reg[o.index()]; };
    const double coord[3] = {q.x, q.y, q.z};
    for (std::size_t t = 0; t < prog.ops.size(); ++t) {
        const SlpOp& op = prog.ops[t];
        switch (op.kind) {
            case SlpOp::Kind::load: reg[t] = coord[op.axis]; break;
            case SlpOp::Kind::constant: reg[t] = prog.consts[op.const_index]; break;
            case SlpOp::Kind::mul: reg[t] = operand(op.lhs) * operand(op.rhs); break;
            case SlpOp::Kind::add: reg[t] = operand(op.lhs) + operand(op.rhs); break;
        }
    }
    return reg[prog.out_reg];
}

// ---------------------------------------------------------------------------

inline std::string slp_to_text(const StraightLineProgram& prog) {
    std::string s = "slp v1\n";
    s += "consts " + std::to_string(prog.consts.size()) + "\n";
    for (std::size_t i = 0; i < prog.consts.size(); ++i)
        s += "c" + std::to_string(i) + " = " + format_double(prog.consts[i]) + "\n";
    s += "ops " + std::to_string(prog.ops.size()) + "\n";
    auto operand = [](SlpOperand o) {
        return (o.is_const() ? "c" : "r") + std::to_string(o.index());
    };
    static const char* axis_name[3] = {"x", "y", "z"};
    for (std::size_t t = 0; t < prog.ops.size(); ++t) {
        const SlpOp& op = prog.ops[t];
        s += "r" + std::to_string(t) + " = ";
        switch (op.kind) {
            case SlpOp::Kind::load: s += std::string("load ") + axis_name[op.axis]; break;
            case SlpOp::Kind::constant: s += "const c" + std::to_string(op.const_index); break;
            case SlpOp::Kind::mul: s += "mul " + operand(op.lhs) + " " + operand(op.rhs); break;
            case SlpOp::Kind::add: s += "add " + operand(op.lhs) + " " + operand(op.rhs); break;
        }
        s += "\n";
    }
    s += "out r" + std::to_string(prog.out_reg) + "\n";
    return s;
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> parts;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) parts.push_back(tok);
    return parts;
}

inline int parse_uint_tok(const std::string& tok, const char* what) {
    if (tok.empty() || tok.size() > 7) throw input_error(std::string("slp: malformed ") + what);
    int v = 0;
    for (char ch : tok) {
        if (ch < '0' || ch > '9') throw input_error(std::string("slp: malformed ") + what);
        v = v * 10 + (ch - '0');
    }
    return v;
}

inline int parse_indexed(const std::string& tok, char prefix, int limit, const char* what) {
    if (tok.size() < 2 || tok[0] != prefix)
        throw input_error(std::string("slp: expected ") + what + ", got '" + tok + "'");
    int idx = 0;
    for (std::size_t i = 1; i < tok.size(); ++i) {
        if (tok[i] < '0' || tok[i] > '9')
            throw input_error(std::string("slp: malformed ") + what + " '" + tok + "'");
        idx = idx * 10 + (tok[i] - '0');
    }
    if (idx >= limit) throw input_error(std::string("slp: ") + what + " out of range: '" + tok + "'");
    return idx;
}

}  // namespace detail

inline StraightLineProgram slp_from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    auto next_line = [&]() {
        if (!std::getline(is, line)) throw input_error("slp: truncated program");
        return line;
    };
    if (next_line() != "slp v1") throw input_error("slp: missing 'slp v1' header");

    StraightLineProgram prog;
    auto header = detail::split_ws(next_line());
    if (header.size() != 2 || header[0] != "consts") throw input_error("slp: missing consts header");
    int nconsts = detail::parse_uint_tok(header[1], "consts count");
    for (int i = 0; i < nconsts; ++i) {
        auto parts = detail::split_ws(next_line());
        if (parts.size() != 3 || parts[1] != "=" ||
            detail::parse_indexed(parts[0], 'c', nconsts, "const id") != i)
            throw input_error("slp: malformed const line '" + line + "'");
        prog.consts.push_back(parse_double(parts[2]));
    }

    header = detail::split_ws(next_line());
    if (header.size() != 2 || header[0] != "ops") throw input_error("slp: missing ops header");
    int nops = detail::parse_uint_tok(header[1], "ops count");
    auto parse_operand = [&](const std::string& tok, int defined) {
        if (!tok.empty() && tok[0] == 'c')
            return SlpOperand::cref(detail::parse_indexed(tok, 'c', nconsts, "const ref"));
        return SlpOperand::reg(detail::parse_indexed(tok, 'r', defined, "register"));
    };
    for (int t = 0; t < nops; ++t) {
        auto parts = detail::split_ws(next_line());
        if (parts.size() < 4 || parts[1] != "=" ||
            detail::parse_indexed(parts[0], 'r', t + 1, "register") != t)
            throw input_error("slp: malformed op line '" + line + "'");
        SlpOp op;
        if (parts[2] == "load" && parts.size() == 4) {
            op.kind = SlpOp::Kind::load;
            if (parts[3] == "x") op.axis = 0;
            else if (parts[3] == "y") op.axis = 1;
            else if (parts[3] == "z") op.axis = 2;
            else throw input_error("slp: bad load axis '" + parts[3] + "'");
        } else if (parts[2] == "const" && parts.size() == 4) {
            op.kind = SlpOp::Kind::constant;
            op.const_index = detail::parse_indexed(parts[3], 'c', nconsts, "const ref");
        } else if ((parts[2] == "mul" || parts[2] == "add") && parts.size() == 5) {
            op.kind = parts[2] == "mul" ? SlpOp::Kind::mul : SlpOp::Kind::add;
            op.lhs = parse_operand(parts[3], t);
            op.rhs = parse_operand(parts[4], t);
        } else {
            throw input_error("slp: unknown op '" + line + "'");
        }
        prog.ops.push_back(op);
    }

    auto parts = detail::split_ws(next_line());
    if (parts.size() != 2 || parts[0] != "out")
        throw input_error("slp: missing out line");
    prog.out_reg = detail::parse_indexed(parts[1], 'r', nops, "register");
    while (std::getline(is, line))
        if (!line.empty()) throw input_error("slp: trailing content after out line");
    return prog;
}

}  // namespace bqi
