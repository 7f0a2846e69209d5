#include "trpinn/metrics.hpp"

#include <cmath>
#include <memory>

#include "trpinn/error.hpp"
#include "trpinn/losses.hpp"

namespace trpinn {

void EvalGrids::validate() const {
    if (radial == 0 || angular == 0) {
        throw ConfigError("interior evaluation grid must be nonempty");
    }
    if (boundary < 3) {
        throw ConfigError("boundary evaluation grid needs at least 3 points");
    }
}

FieldFn mlp_field(const Mlp& mlp) {
    auto cache = std::make_shared<BatchCache>();
    return [&mlp, cache](const Eigen::Matrix2Xd& pts) {
        constexpr Eigen::Index kChunk = 4096;
        FieldSample out;
        out.u.resize(pts.cols());
        out.ux.resize(pts.cols());
        out.uy.resize(pts.cols());
        for (Eigen::Index b = 0; b < pts.cols(); b += kChunk) {
            const Eigen::Index n = std::min(kChunk, pts.cols() - b);
            const Eigen::Matrix2Xd block = pts.middleCols(b, n);
            const FieldBatch fb = batch_forward(mlp, block, Derivs::gradient, cache.get());
            out.u.segment(b, n) = fb.u;
            out.ux.segment(b, n) = fb.ux;
            out.uy.segment(b, n) = fb.uy;
        }
        return out;
    };
}

ErrorEvaluator::ErrorEvaluator(const FourierSeries& oracle, const EvalGrids& grids)
    : grids_(grids) {
    grids_.validate();
    const auto nr = static_cast<Eigen::Index>(grids_.radial);
    const auto nt = static_cast<Eigen::Index>(grids_.angular);
    const double dr = 1.0 / static_cast<double>(nr);
    const double dt = kTwoPi / static_cast<double>(nt);
    interior_.resize(2, nr * nt);
    weights_.resize(nr * nt);
    ref_interior_.u.resize(nr * nt);
    ref_interior_.ux.resize(nr * nt);
    ref_interior_.uy.resize(nr * nt);
    for (Eigen::Index i = 0; i < nr; ++i) {
        const double r = (static_cast<double>(i) + 0.5) * dr;
        for (Eigen::Index j = 0; j < nt; ++j) {
            const double t = (static_cast<double>(j) + 0.5) * dt;
            const Eigen::Index k = i * nt + j;
            interior_(0, k) = r * std::cos(t);
            interior_(1, k) = r * std::sin(t);
            weights_(k) = r * dr * dt;
            const OracleValue o = oracle_eval(oracle, {interior_(0, k), interior_(1, k)});
            ref_interior_.u(k) = o.u;
            ref_interior_.ux(k) = o.ux;
            ref_interior_.uy(k) = o.uy;
        }
    }
    const auto nb = static_cast<Eigen::Index>(grids_.boundary);
    boundary_.resize(2, nb);
    ref_boundary_.resize(nb);
    for (Eigen::Index k = 0; k < nb; ++k) {
        const double t = kTwoPi * static_cast<double>(k) / static_cast<double>(nb);
        boundary_(0, k) = std::cos(t);
        boundary_(1, k) = std::sin(t);
        ref_boundary_(k) = oracle.boundary_value(t);
    }

    ref_l2_in_sq_ = (weights_.array() * ref_interior_.u.array().square()).sum();
    ref_grad_sq_ = (weights_.array() *
                    (ref_interior_.ux.array().square() + ref_interior_.uy.array().square()))
                       .sum();
    ref_l2_bd_sq_ = kTwoPi / static_cast<double>(nb) * ref_boundary_.squaredNorm();
    ref_semi_ = discrete_seminorm(std::span<const double>(ref_boundary_.data(), nb));
}

ErrorReport ErrorEvaluator::evaluate(const FieldFn& field) const {
    const FieldSample in = field(interior_);
    const FieldSample bd = field(boundary_);
    if (in.u.size() != interior_.cols() || in.ux.size() != interior_.cols() ||
        in.uy.size() != interior_.cols() || bd.u.size() != boundary_.cols()) {
        throw StructuralError("field returned the wrong number of values");
    }

    const Eigen::ArrayXd w = weights_.transpose().array();
    const Eigen::ArrayXd eu = (in.u - ref_interior_.u).transpose().array();
    const Eigen::ArrayXd ex = (in.ux - ref_interior_.ux).transpose().array();
    const Eigen::ArrayXd ey = (in.uy - ref_interior_.uy).transpose().array();
    const double l2_in_sq = (w * eu.square()).sum();
    const double grad_sq = (w * (ex.square() + ey.square())).sum();

    const Eigen::RowVectorXd eb = bd.u - ref_boundary_;
    const auto nb = eb.size();
    const double l2_bd_sq = kTwoPi / static_cast<double>(nb) * eb.squaredNorm();
    const double semi = discrete_seminorm(std::span<const double>(eb.data(), nb));

    ErrorReport r;
    r.abs_l2_inside = std::sqrt(l2_in_sq);
    r.abs_h1_inside = std::sqrt(l2_in_sq + grad_sq);
    r.abs_l2_boundary = std::sqrt(l2_bd_sq);
    r.abs_h_half_boundary = std::sqrt(l2_bd_sq + semi);
    r.ref_l2_inside = std::sqrt(ref_l2_in_sq_);
    r.ref_h1_inside = std::sqrt(ref_l2_in_sq_ + ref_grad_sq_);
    r.ref_l2_boundary = std::sqrt(ref_l2_bd_sq_);
    r.ref_h_half_boundary = std::sqrt(ref_l2_bd_sq_ + ref_semi_);

    const auto ratio = [](double num, double den, const char* which) {
        if (!(den > 0.0)) {
            throw DataError(std::string("degenerate reference: ") + which +
                            " norm of the true solution is zero");
        }
        return num / den;
    };
    r.rel_l2_inside = ratio(r.abs_l2_inside, r.ref_l2_inside, "L2(interior)");
    r.rel_h1_inside = ratio(r.abs_h1_inside, r.ref_h1_inside, "H1(interior)");
    r.rel_l2_boundary = ratio(r.abs_l2_boundary, r.ref_l2_boundary, "L2(boundary)");
    r.rel_h_half_boundary =
        ratio(r.abs_h_half_boundary, r.ref_h_half_boundary, "H1/2(boundary)");
    return r;
}

ErrorReport ErrorEvaluator::evaluate(const Mlp& mlp) const { return evaluate(mlp_field(mlp)); }

ErrorReport relative_errors(const Mlp& mlp, const FourierSeries& oracle, const EvalGrids& grids) {
    return ErrorEvaluator(oracle, grids).evaluate(mlp);
}

}  // namespace trpinn
