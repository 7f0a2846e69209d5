#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "trpinn/autodiff.hpp"
#include "trpinn/geometry.hpp"

namespace trpinn {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Fully connected tanh network R^2 -> R with a linear output layer.
///
/// Parameters flatten layer by layer; within a layer the weight matrix comes
/// first (row-major, shape out x in), followed by the bias vector. Gradients
/// and optimizer state use the same order.
struct Mlp {
    std::vector<std::size_t> layer_sizes;
    std::vector<RowMatrix> weights;
    std::vector<Eigen::VectorXd> biases;
    std::uint64_t seed = 0;

    std::size_t transitions() const noexcept { return weights.size(); }
    std::size_t parameter_count() const;
    std::vector<double> flatten() const;
    /// Throws StructuralError when the length does not match parameter_count().
    void unflatten(std::span<const double> params);
};

/// Parameter count implied by a list of layer sizes.
std::size_t parameter_count(std::span<const std::size_t> layer_sizes);

/// Throws ConfigError unless sizes start with 2, end with 1 and are all positive.
void validate_layer_sizes(std::span<const std::size_t> layer_sizes);

/// Glorot-uniform weights (bound sqrt(6 / (fan_in + fan_out))), zero biases.
Mlp init_mlp(std::span<const std::size_t> layer_sizes, std::uint64_t seed);

/// Network with every parameter set to zero.
Mlp zero_mlp(std::span<const std::size_t> layer_sizes);

/// Plain evaluation. Accumulates each neuron as (sum_j w_ij a_j) + b_i, left to
/// right, which is the order the tape path uses too.
double forward(const Mlp& mlp, Point x);

/// Network parameters registered as leaf nodes of a tape, in flattening order.
struct TapedMlp {
    std::vector<ad::NodeMatrix> weights;
    std::vector<std::vector<ad::Var>> biases;
    std::vector<ad::Var> params;
};

TapedMlp bind_parameters(const Mlp& mlp, ad::Tape& tape);

/// Output value as a tape node (no input derivatives).
ad::Var forward_taped(const TapedMlp& net, Point x, ad::Tape& tape);

/// Output value, input gradient and input Hessian, all as tape nodes.
ad::Dual2 forward_dual2(const TapedMlp& net, Point x, ad::Tape& tape);

// ---------------------------------------------------------------------------
// Batched evaluation. Propagates (value, gradient, Laplacian) for many points
// at once with dense matrix products and differentiates the result with a
// hand-written reverse pass. The Laplacian propagates on its own because
// lap(tanh(z)) = tanh'(z) lap(z) + tanh''(z) |grad z|^2.

enum class Derivs { value, gradient, laplacian };

struct FieldBatch {
    Eigen::RowVectorXd u;
    Eigen::RowVectorXd ux;   // empty for Derivs::value
    Eigen::RowVectorXd uy;   // empty for Derivs::value
    Eigen::RowVectorXd lap;  // empty unless Derivs::laplacian
};

/// Per-layer intermediates kept for batch_backward. The value, gradient and
/// Laplacian streams sit side by side as column blocks of one matrix
/// ([A | Gx | Gy | L], each block B columns), so every layer is one product.
/// Reusing a cache across calls of the same shape avoids reallocation.
struct BatchCache {
    Derivs derivs = Derivs::value;
    Eigen::Index points = 0;
    std::vector<Eigen::MatrixXd> x;  // layer inputs
    std::vector<Eigen::MatrixXd> z;  // pre-activations
    std::vector<Eigen::MatrixXd> s;  // tanh of the value block of z (hidden layers)
};

/// `points` is 2 x B. Pass a cache to allow a following batch_backward.
FieldBatch batch_forward(const Mlp& mlp, const Eigen::Matrix2Xd& points, Derivs derivs,
                         BatchCache* cache = nullptr);

/// Adds d(sum_k bar_u[k] u_k + bar_lap[k] lap_k)/d(theta) into `grad`
/// (flattening order). `bar_lap` must be empty unless the cache holds a
/// Laplacian pass.
void batch_backward(const Mlp& mlp, const BatchCache& cache, const Eigen::RowVectorXd& bar_u,
                    const Eigen::RowVectorXd& bar_lap, std::span<double> grad);

Eigen::Matrix2Xd to_matrix(std::span<const Point> points);

// ---------------------------------------------------------------------------
// Checkpoints: little-endian binary, layout documented in docs/formats.md.

struct Checkpoint {
    std::vector<std::size_t> layer_sizes;
    std::uint64_t seed = 0;
    std::uint64_t iteration = 0;
    std::vector<double> params;
};

void write_checkpoint(const std::filesystem::path& path, const Mlp& mlp, std::uint64_t iteration);
Checkpoint read_checkpoint(const std::filesystem::path& path);
Mlp mlp_from_checkpoint(const Checkpoint& ckpt);

}  // namespace trpinn
