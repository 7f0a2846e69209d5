#include "trpinn/autodiff.hpp"

#include <cmath>
#include <string>

#include "trpinn/error.hpp"

namespace trpinn::ad {

double Var::value() const {
    if (tape == nullptr) {
        throw StructuralError("value() on a detached Var");
    }
    return tape->value(index);
}

Tape::Tape() { offsets_.push_back(0); }

void Tape::reserve(std::size_t nodes, std::size_t operands) {
    values_.reserve(nodes);
    kinds_.reserve(nodes);
    offsets_.reserve(nodes + 1);
    operands_.reserve(operands);
    partials_.reserve(operands);
}

Var Tape::push(OpKind kind, std::span<const std::uint32_t> operands,
               std::span<const double> partials, double value) {
    if (operands.size() != partials.size()) {
        throw StructuralError("operand/partial count mismatch");
    }
    const auto self = static_cast<std::uint32_t>(values_.size());
    for (const auto op : operands) {
        if (op >= self) {
            throw StructuralError("operand index " + std::to_string(op) +
                                  " does not precede node " + std::to_string(self));
        }
    }
    values_.push_back(value);
    kinds_.push_back(kind);
    operands_.insert(operands_.end(), operands.begin(), operands.end());
    partials_.insert(partials_.end(), partials.begin(), partials.end());
    offsets_.push_back(static_cast<std::uint32_t>(operands_.size()));
    return Var{this, self};
}

Var Tape::variable(double value) { return push(OpKind::leaf, {}, {}, value); }

Var Tape::constant(double value) { return push(OpKind::constant, {}, {}, value); }

std::span<const std::uint32_t> Tape::operands(std::uint32_t node) const {
    const auto b = offsets_.at(node);
    return {operands_.data() + b, offsets_.at(node + 1) - b};
}

std::span<const double> Tape::partials(std::uint32_t node) const {
    const auto b = offsets_.at(node);
    return {partials_.data() + b, offsets_.at(node + 1) - b};
}

std::vector<double> Tape::adjoints(Var out) const {
    if (!owns(out)) {
        throw StructuralError("output node is not on this tape");
    }
    std::vector<double> adj(size(), 0.0);
    adj[out.index] = 1.0;
    for (std::uint32_t k = out.index + 1; k-- > 0;) {
        const double a = adj[k];
        if (a == 0.0) {
            continue;
        }
        const auto b = offsets_[k];
        const auto e = offsets_[k + 1];
        for (auto p = b; p < e; ++p) {
            adj[operands_[p]] += a * partials_[p];
        }
    }
    return adj;
}

namespace {

Tape& common_tape(Var a, Var b) {
    if (a.tape == nullptr || a.tape != b.tape) {
        throw StructuralError("operands live on different tapes");
    }
    return *a.tape;
}

Tape& tape_of(Var a) {
    if (a.tape == nullptr) {
        throw StructuralError("detached Var");
    }
    return *a.tape;
}

Var binary(OpKind kind, Var a, Var b, double da, double db, double v) {
    Tape& t = common_tape(a, b);
    const std::uint32_t ops[2] = {a.index, b.index};
    const double parts[2] = {da, db};
    return t.push(kind, ops, parts, v);
}

Var unary(OpKind kind, Var a, double da, double v) {
    Tape& t = tape_of(a);
    const std::uint32_t ops[1] = {a.index};
    const double parts[1] = {da};
    return t.push(kind, ops, parts, v);
}

}  // namespace

Var operator+(Var a, Var b) { return binary(OpKind::add, a, b, 1.0, 1.0, a.value() + b.value()); }
Var operator-(Var a, Var b) { return binary(OpKind::sub, a, b, 1.0, -1.0, a.value() - b.value()); }
Var operator*(Var a, Var b) {
    const double va = a.value();
    const double vb = b.value();
    return binary(OpKind::mul, a, b, vb, va, va * vb);
}
Var operator-(Var a) { return unary(OpKind::neg, a, -1.0, -a.value()); }
Var operator*(double c, Var a) { return unary(OpKind::scale, a, c, c * a.value()); }
Var operator*(Var a, double c) { return unary(OpKind::scale, a, c, a.value() * c); }
Var operator+(Var a, double c) { return unary(OpKind::add, a, 1.0, a.value() + c); }
Var operator+(double c, Var a) { return unary(OpKind::add, a, 1.0, c + a.value()); }
Var operator-(double c, Var a) { return unary(OpKind::sub, a, -1.0, c - a.value()); }
Var operator-(Var a, double c) { return unary(OpKind::sub, a, 1.0, a.value() - c); }

Var tanh(Var a) {
    const double s = std::tanh(a.value());
    return unary(OpKind::tanh, a, 1.0 - s * s, s);
}

Var square(Var a) {
    const double v = a.value();
    return unary(OpKind::square, a, 2.0 * v, v * v);
}

Var sum(std::span<const Var> terms) {
    if (terms.empty()) {
        throw StructuralError("sum of an empty span");
    }
    Tape& t = tape_of(terms.front());
    std::vector<std::uint32_t> ops;
    ops.reserve(terms.size());
    double acc = 0.0;
    for (const Var& v : terms) {
        if (v.tape != &t) {
            throw StructuralError("operands live on different tapes");
        }
        ops.push_back(v.index);
        acc += v.value();
    }
    const std::vector<double> parts(terms.size(), 1.0);
    return t.push(OpKind::sum, ops, parts, acc);
}

Var dot(std::span<const Var> w, std::span<const Var> x) {
    if (w.size() != x.size() || w.empty()) {
        throw StructuralError("dot: length mismatch (" + std::to_string(w.size()) + " vs " +
                              std::to_string(x.size()) + ")");
    }
    Tape& t = tape_of(w.front());
    std::vector<std::uint32_t> ops;
    std::vector<double> parts;
    ops.reserve(2 * w.size());
    parts.reserve(2 * w.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (w[j].tape != &t || x[j].tape != &t) {
            throw StructuralError("operands live on different tapes");
        }
        const double wv = t.value(w[j].index);
        const double xv = t.value(x[j].index);
        acc += wv * xv;
        ops.push_back(w[j].index);
        parts.push_back(xv);
        ops.push_back(x[j].index);
        parts.push_back(wv);
    }
    return t.push(OpKind::dot, ops, parts, acc);
}

std::vector<double> grad_params(Var loss, const Tape& tape, std::span<const Var> params) {
    if (!tape.owns(loss)) {
        throw StructuralError("loss node is not on the given tape");
    }
    const auto adj = tape.adjoints(loss);
    std::vector<double> g;
    g.reserve(params.size());
    for (const Var& p : params) {
        if (!tape.owns(p)) {
            throw StructuralError("parameter node is not on the given tape");
        }
        g.push_back(adj[p.index]);
    }
    return g;
}

Dual2 seed_input(Tape& tape, double x1, double x2, int axis) {
    const Var zero = tape.constant(0.0);
    const Var one = tape.constant(1.0);
    Dual2 d;
    d.value = tape.constant(axis == 0 ? x1 : x2);
    d.grad = {axis == 0 ? one : zero, axis == 0 ? zero : one};
    d.hess = {zero, zero, zero};
    return d;
}

Dual2 constant_dual(Tape& tape, double v) {
    const Var zero = tape.constant(0.0);
    return Dual2{tape.constant(v), {zero, zero}, {zero, zero, zero}};
}

std::vector<Dual2> dual2_affine(const NodeMatrix& w, std::span<const Var> b,
                                std::span<const Dual2> a) {
    if (w.data.size() != w.rows * w.cols) {
        throw StructuralError("malformed NodeMatrix");
    }
    if (w.cols != a.size() || w.rows != b.size()) {
        throw StructuralError("dual2_affine: W is " + std::to_string(w.rows) + "x" +
                              std::to_string(w.cols) + ", b has " + std::to_string(b.size()) +
                              ", input has " + std::to_string(a.size()));
    }
    // Gather the six input component columns once.
    std::array<std::vector<Var>, 6> cols;
    for (auto& c : cols) {
        c.reserve(a.size());
    }
    for (const Dual2& d : a) {
        cols[0].push_back(d.value);
        cols[1].push_back(d.grad[0]);
        cols[2].push_back(d.grad[1]);
        cols[3].push_back(d.hess[0]);
        cols[4].push_back(d.hess[1]);
        cols[5].push_back(d.hess[2]);
    }
    std::vector<Dual2> out;
    out.reserve(w.rows);
    for (std::size_t r = 0; r < w.rows; ++r) {
        const auto row = w.row(r);
        Dual2 o;
        o.value = dot(row, cols[0]) + b[r];
        o.grad = {dot(row, cols[1]), dot(row, cols[2])};
        o.hess = {dot(row, cols[3]), dot(row, cols[4]), dot(row, cols[5])};
        out.push_back(o);
    }
    return out;
}

Dual2 dual2_tanh(const Dual2& a) {
    const Var s = tanh(a.value);
    const Var d = 1.0 - square(s);  // tanh'
    const Var e = -2.0 * (s * d);   // tanh''
    Dual2 o;
    o.value = s;
    o.grad = {d * a.grad[0], d * a.grad[1]};
    o.hess = {d * a.hess[0] + e * (a.grad[0] * a.grad[0]),
              d * a.hess[1] + e * (a.grad[0] * a.grad[1]),
              d * a.hess[2] + e * (a.grad[1] * a.grad[1])};
    return o;
}

}  // namespace trpinn::ad
