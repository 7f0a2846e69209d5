#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "trpinn/geometry.hpp"
#include "trpinn/model.hpp"

namespace trpinn {

// --- symmetric eigensolver -------------------------------------------------

struct SymmetricEigen {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns, matching `values`; empty unless requested
    int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// tol * ||A||_F. Only the upper triangle of `a` is read.
SymmetricEigen jacobi_eigen(Eigen::MatrixXd a, bool want_vectors = true, double tol = 1e-12,
                            int max_sweeps = 100);

// --- kernels ---------------------------------------------------------------

/// Row i is the parameter gradient of u_NN at boundary point i.
Eigen::MatrixXd boundary_jacobian(const Mlp& mlp, const BoundarySet& boundary);

/// Row i is the parameter gradient of Laplace(u_NN) at points[i].
Eigen::MatrixXd residual_jacobian(const Mlp& mlp, std::span<const Point> points);

/// NTK blocks K = [J_b; J_r][J_b; J_r]^T. The residual blocks are empty when
/// no residual points are given.
struct KernelBlocks {
    Eigen::MatrixXd jb, jr;
    Eigen::MatrixXd kbb, krr, kbr;

    std::size_t n_b() const { return static_cast<std::size_t>(kbb.rows()); }
    std::size_t n_r() const { return static_cast<std::size_t>(krr.rows()); }
    Eigen::MatrixXd full() const;
};

KernelBlocks kernel_blocks(const Mlp& mlp, const BoundarySet& boundary,
                           std::span<const Point> residual_points = {});

// --- the semi-norm dynamics matrix -----------------------------------------

/// M = (2/N + 4) I - 2 (P + P^-1) with P the cyclic shift. The skip-pair
/// variant also adds 4 I - 2 (P^2 + P^-2), which is what the second sum of
/// the semi-norm contributes; it is offered for exploration only.
struct DynamicsMatrixM {
    std::size_t n = 0;
    bool skip_pairs = false;
    Eigen::VectorXd first_row;  // symmetric circulant generator

    Eigen::MatrixXd dense() const;
    /// Eigenvalue k: 2/N + 4 - 4 cos(2 pi k / N) (plus 4 - 4 cos(4 pi k / N) with skip pairs).
    Eigen::VectorXd eigenvalues_closed_form() const;
};

/// Throws ConfigError for n_b < 3.
DynamicsMatrixM build_m(std::size_t n_b, bool with_skip_pairs = false);

/// f(C) for a symmetric circulant C given by its first row, via the Fourier
/// eigenbasis. Returns the dense matrix.
Eigen::MatrixXd circulant_function(const Eigen::VectorXd& first_row,
                                   const std::function<double(double)>& f);

// --- spectra ---------------------------------------------------------------

struct SpectrumComparison {
    Eigen::VectorXd lambda_p;  // (1/N_b) K_bb, descending, top_k
    Eigen::VectorXd lambda_h;  // K_bb M via M^1/2 K_bb M^1/2, descending, top_k
};

/// Throws DataError if K_bb is asymmetric beyond 1e-10 (relative to its
/// largest entry) and ConfigError if top_k > N_b.
SpectrumComparison spectrum_compare(const Eigen::MatrixXd& kbb, std::size_t top_k,
                                    bool with_skip_pairs = false);

// --- linearized gradient flow ----------------------------------------------

struct Trajectory {
    std::vector<double> times;
    Eigen::MatrixXd residuals;  // one column per time
    std::vector<double> norms;  // Euclidean norm of each column
};

struct DynamicsResult {
    Trajectory pinn;
    Trajectory trpinn;
};

/// Solves d r/dt = -K S r exactly through the eigendecomposition of the
/// symmetric S^1/2 K S^1/2, for S = diag(2/N_b I, 2/N_r I) (PINN) and
/// S = diag(M, 2/N_r I) (TRPINN). K is the frozen (N_b + N_r) square kernel;
/// the first n_b rows are boundary rows. The initial residual is
/// u(0) - targets. Throws DataError if K is not PSD within -1e-10 ||K||.
DynamicsResult simulate_dynamics(const Eigen::MatrixXd& k, std::size_t n_b,
                                 const Eigen::VectorXd& initial_residual,
                                 std::span<const double> times, bool with_skip_pairs = false);

/// The scaling S used above, as a dense matrix.
Eigen::MatrixXd dynamics_scaling(std::size_t n_b, std::size_t n_r, bool trpinn,
                                 bool with_skip_pairs = false);

}  // namespace trpinn
