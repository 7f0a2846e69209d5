#pragma once

#include <functional>
#include <span>
#include <vector>

#include "trpinn/autodiff.hpp"
#include "trpinn/boundary_data.hpp"
#include "trpinn/geometry.hpp"
#include "trpinn/model.hpp"

namespace trpinn {

/// Weights of total = alpha * inside + beta * boundary + gamma * semi.
/// gamma = 0 is the vanilla PINN loss.
struct LossWeights {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 0.0;

    /// Throws ConfigError unless all three are finite and >= 0.
    void validate() const;
};

/// Right-hand side f of Laplace(u) = f. Empty means f = 0.
using SourceFn = std::function<double(Point)>;

/// Mean squared Laplacian residual over the interior points.
ad::Var loss_inside(const TapedMlp& net, const InteriorSet& interior, const SourceFn& f,
                    ad::Tape& tape);

/// Mean squared boundary mismatch u_NN - g.
ad::Var loss_boundary_l2(const TapedMlp& net, const BoundarySet& boundary,
                         const BoundaryFunction& g, ad::Tape& tape);

/// Neighbour-pair semi-norm of cyclically ordered residuals:
///   sum_i (e[i+1] - e[i])^2 + sum_i (e[i+2] - e[i])^2,  indices mod N.
/// No 1/N factor and no distance denominators. Requires N >= 3.
double discrete_seminorm(std::span<const double> e);
ad::Var discrete_seminorm(std::span<const ad::Var> e);

/// alpha * loss_inside + beta * loss_boundary_l2 + gamma * semi-norm of the
/// boundary residuals. With gamma = 0 the semi-norm term is not formed.
ad::Var loss_total(const TapedMlp& net, const InteriorSet& interior, const BoundarySet& boundary,
                   const BoundaryFunction& g, const SourceFn& f, const LossWeights& w,
                   ad::Tape& tape);

struct LossParts {
    double inside = 0.0;
    double boundary = 0.0;
    double semi = 0.0;
    double total = 0.0;
};

/// The same total loss evaluated over the whole point sets in one batched pass,
/// with its parameter gradient from batch_backward. This is what training
/// calls; the tape functions above are the reference it is checked against.
class FusedLoss {
  public:
    FusedLoss(const Mlp& shape, const InteriorSet& interior, const BoundarySet& boundary,
              const BoundaryFunction& g, const SourceFn& f, const LossWeights& w);

    std::size_t parameter_count() const { return net_.parameter_count(); }

    /// Returns the total loss and writes its gradient into `grad`.
    double value_and_grad(std::span<const double> params, std::span<double> grad);
    double value(std::span<const double> params);

    const LossParts& last_parts() const noexcept { return parts_; }

  private:
    double evaluate(std::span<const double> params, std::span<double>* grad);

    Mlp net_;
    Eigen::Matrix2Xd interior_;
    Eigen::Matrix2Xd boundary_;
    Eigen::RowVectorXd f_values_;
    Eigen::RowVectorXd g_values_;
    LossWeights w_;
    LossParts parts_;
    BatchCache in_cache_;
    BatchCache bd_cache_;
};

}  // namespace trpinn
