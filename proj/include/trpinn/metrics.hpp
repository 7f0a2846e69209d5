#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>

#include "trpinn/boundary_data.hpp"
#include "trpinn/model.hpp"

namespace trpinn {

/// Evaluation grids, independent of the training samples. The interior grid
/// is a polar tensor grid of cell midpoints with weights r dr dtheta; the
/// boundary grid is uniform in the angle.
struct EvalGrids {
    std::size_t radial = 200;
    std::size_t angular = 400;
    std::size_t boundary = 4096;

    void validate() const;
};

/// Relative errors ||u_NN - u|| / ||u|| in four norms. H1 is the full norm
/// (L2 plus gradient), H^1/2 on the boundary is sqrt(L2^2 + discrete
/// semi-norm^2 on the dense boundary grid). The absolute numerator and the
/// reference norms are kept alongside.
struct ErrorReport {
    double rel_h1_inside = 0.0;
    double rel_l2_inside = 0.0;
    double rel_h_half_boundary = 0.0;
    double rel_l2_boundary = 0.0;

    double abs_h1_inside = 0.0;
    double abs_l2_inside = 0.0;
    double abs_h_half_boundary = 0.0;
    double abs_l2_boundary = 0.0;

    double ref_h1_inside = 0.0;
    double ref_l2_inside = 0.0;
    double ref_h_half_boundary = 0.0;
    double ref_l2_boundary = 0.0;
};

/// Values and gradients of a field on a 2 x B block of points.
struct FieldSample {
    Eigen::RowVectorXd u, ux, uy;
};
using FieldFn = std::function<FieldSample(const Eigen::Matrix2Xd&)>;

/// Batched adapter for a network.
FieldFn mlp_field(const Mlp& mlp);

/// Caches the grids and the oracle values on them so repeated evaluations
/// during training only pay for the network.
class ErrorEvaluator {
  public:
    ErrorEvaluator(const FourierSeries& oracle, const EvalGrids& grids);

    /// Throws DataError if a reference norm is zero (degenerate reference).
    ErrorReport evaluate(const FieldFn& field) const;
    ErrorReport evaluate(const Mlp& mlp) const;

    const EvalGrids& grids() const noexcept { return grids_; }

  private:
    EvalGrids grids_;
    Eigen::Matrix2Xd interior_;
    Eigen::RowVectorXd weights_;
    Eigen::Matrix2Xd boundary_;
    FieldSample ref_interior_;
    Eigen::RowVectorXd ref_boundary_;
    double ref_l2_in_sq_ = 0.0;
    double ref_grad_sq_ = 0.0;
    double ref_l2_bd_sq_ = 0.0;
    double ref_semi_ = 0.0;
};

ErrorReport relative_errors(const Mlp& mlp, const FourierSeries& oracle, const EvalGrids& grids);

}  // namespace trpinn
