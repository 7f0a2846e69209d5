#pragma once

// Scalar reverse-mode tape plus a forward-mode (value, gradient, Hessian)
// triple over two input coordinates whose components are tape nodes. Pushing
// the triple through a network and then sweeping the tape backwards gives
// exact parameter gradients of losses that contain input derivatives.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace trpinn::ad {

enum class OpKind : std::uint8_t {
    leaf,
    constant,
    add,
    sub,
    mul,
    neg,
    scale,
    tanh,
    square,
    sum,
    dot,
};

class Tape;

/// Handle to a scalar node. Cheap to copy; only valid while its tape lives.
struct Var {
    Tape* tape = nullptr;
    std::uint32_t index = 0;

    double value() const;
};

/// Append-only list of scalar nodes in topological order.
///
/// Every node stores its operand indices and the local partial derivative of
/// its value with respect to each operand, so the reverse sweep is a single
/// pass of multiply-adds from the output node down to the leaves.
class Tape {
  public:
    Tape();

    Var variable(double value);
    Var constant(double value);

    /// Generic node. Operand indices must be < size().
    Var push(OpKind kind, std::span<const std::uint32_t> operands,
             std::span<const double> partials, double value);

    std::size_t size() const noexcept { return values_.size(); }
    double value(std::uint32_t node) const { return values_.at(node); }
    OpKind kind(std::uint32_t node) const { return kinds_.at(node); }
    std::span<const std::uint32_t> operands(std::uint32_t node) const;
    std::span<const double> partials(std::uint32_t node) const;

    bool owns(Var v) const noexcept { return v.tape == this && v.index < size(); }

    /// One reverse sweep seeded with d(out)/d(out) = 1. Returns one adjoint per node.
    std::vector<double> adjoints(Var out) const;

    void reserve(std::size_t nodes, std::size_t operands);

  private:
    std::vector<double> values_;
    std::vector<OpKind> kinds_;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> operands_;
    std::vector<double> partials_;
};

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator-(Var a);
Var operator*(double c, Var a);
Var operator*(Var a, double c);
Var operator+(Var a, double c);
Var operator+(double c, Var a);
Var operator-(double c, Var a);
Var operator-(Var a, double c);

Var tanh(Var a);
Var square(Var a);
/// Left-to-right sum. Empty input is an error (no tape to attach to).
Var sum(std::span<const Var> terms);
/// Left-to-right sum of w[i] * x[i], accumulated from 0.0.
Var dot(std::span<const Var> w, std::span<const Var> x);

/// Gradient of `loss` with respect to `params`, in the order given.
/// Throws StructuralError if `loss` (or a parameter) is not a node of `tape`.
std::vector<double> grad_params(Var loss, const Tape& tape, std::span<const Var> params);

/// Row-major matrix of tape nodes.
struct NodeMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Var> data;

    Var operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<const Var> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

/// Value, input gradient (d/dx1, d/dx2) and symmetric input Hessian
/// (xx, xy, yy) of a scalar field, each component a tape node.
struct Dual2 {
    Var value;
    std::array<Var, 2> grad;
    std::array<Var, 3> hess;

    Var laplacian() const { return hess[0] + hess[2]; }
};

/// Triple for the input coordinate `axis` (0 or 1) of the point (x1, x2):
/// value x_axis, gradient e_axis, zero Hessian. All components are constants.
Dual2 seed_input(Tape& tape, double x1, double x2, int axis);

/// Constant field (value v, zero derivatives).
Dual2 constant_dual(Tape& tape, double v);

/// out = W * a + b, applied componentwise to value, gradient and Hessian
/// (the bias only enters the value).
std::vector<Dual2> dual2_affine(const NodeMatrix& w, std::span<const Var> b,
                                std::span<const Dual2> a);

/// tanh chain rule: s = tanh(v), grad' = (1 - s^2) grad,
/// hess' = (1 - s^2) hess + (-2 s (1 - s^2)) grad (x) grad.
Dual2 dual2_tanh(const Dual2& a);

}  // namespace trpinn::ad
