#include "trpinn/losses.hpp"

#include <cmath>
#include <string>

#include "trpinn/error.hpp"

namespace trpinn {

void LossWeights::validate() const {
    const auto check = [](double v, const char* name) {
        if (!std::isfinite(v) || v < 0.0) {
            throw ConfigError(std::string("loss weight ") + name + " must be finite and >= 0");
        }
    };
    check(alpha, "alpha");
    check(beta, "beta");
    check(gamma, "gamma");
}

ad::Var loss_inside(const TapedMlp& net, const InteriorSet& interior, const SourceFn& f,
                    ad::Tape& tape) {
    if (interior.points.empty()) {
        throw ConfigError("loss_inside needs at least one interior point");
    }
    std::vector<ad::Var> terms;
    terms.reserve(interior.points.size());
    for (const Point& x : interior.points) {
        const ad::Dual2 u = forward_dual2(net, x, tape);
        const double fx = f ? f(x) : 0.0;
        terms.push_back(ad::square(u.laplacian() - fx));
    }
    return ad::sum(terms) * (1.0 / static_cast<double>(terms.size()));
}

ad::Var loss_boundary_l2(const TapedMlp& net, const BoundarySet& boundary,
                         const BoundaryFunction& g, ad::Tape& tape) {
    if (boundary.size() == 0) {
        throw ConfigError("loss_boundary_l2 needs at least one boundary point");
    }
    std::vector<ad::Var> terms;
    terms.reserve(boundary.size());
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        const ad::Var u = forward_taped(net, boundary.points[i], tape);
        terms.push_back(ad::square(u - eval_g(g, boundary.angles[i])));
    }
    return ad::sum(terms) * (1.0 / static_cast<double>(terms.size()));
}

double discrete_seminorm(std::span<const double> e) {
    const std::size_t n = e.size();
    if (n < 3) {
        throw ConfigError("discrete semi-norm needs at least 3 ordered samples");
    }
    double adjacent = 0.0;
    double skip = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = e[(i + 1) % n] - e[i];
        adjacent += d * d;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double d = e[(i + 2) % n] - e[i];
        skip += d * d;
    }
    return adjacent + skip;
}

ad::Var discrete_seminorm(std::span<const ad::Var> e) {
    const std::size_t n = e.size();
    if (n < 3) {
        throw ConfigError("discrete semi-norm needs at least 3 ordered samples");
    }
    std::vector<ad::Var> adjacent, skip;
    adjacent.reserve(n);
    skip.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        adjacent.push_back(ad::square(e[(i + 1) % n] - e[i]));
    }
    for (std::size_t i = 0; i < n; ++i) {
        skip.push_back(ad::square(e[(i + 2) % n] - e[i]));
    }
    return ad::sum(adjacent) + ad::sum(skip);
}

ad::Var loss_total(const TapedMlp& net, const InteriorSet& interior, const BoundarySet& boundary,
                   const BoundaryFunction& g, const SourceFn& f, const LossWeights& w,
                   ad::Tape& tape) {
    w.validate();
    if (boundary.size() == 0) {
        throw ConfigError("loss_total needs at least one boundary point");
    }
    const ad::Var inside = loss_inside(net, interior, f, tape);
    // Boundary residuals are shared by the L2 term and the semi-norm.
    std::vector<ad::Var> residuals;
    std::vector<ad::Var> squares;
    residuals.reserve(boundary.size());
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        const ad::Var u = forward_taped(net, boundary.points[i], tape);
        residuals.push_back(u - eval_g(g, boundary.angles[i]));
        squares.push_back(ad::square(residuals.back()));
    }
    const ad::Var bd = ad::sum(squares) * (1.0 / static_cast<double>(squares.size()));
    ad::Var total = w.alpha * inside + w.beta * bd;
    if (w.gamma != 0.0) {
        total = total + w.gamma * discrete_seminorm(residuals);
    }
    return total;
}

// ---------------------------------------------------------------------------

FusedLoss::FusedLoss(const Mlp& shape, const InteriorSet& interior, const BoundarySet& boundary,
                     const BoundaryFunction& g, const SourceFn& f, const LossWeights& w)
    : net_(shape), w_(w) {
    w_.validate();
    if (interior.points.empty()) {
        throw ConfigError("training needs at least one interior point");
    }
    if (boundary.size() < 3 && w_.gamma != 0.0) {
        throw ConfigError("the semi-norm term needs at least 3 boundary points");
    }
    if (boundary.size() == 0) {
        throw ConfigError("training needs boundary points");
    }
    interior_ = to_matrix(interior.points);
    boundary_ = to_matrix(boundary.points);
    f_values_.resize(interior_.cols());
    for (Eigen::Index k = 0; k < interior_.cols(); ++k) {
        f_values_(k) = f ? f(interior.points[static_cast<std::size_t>(k)]) : 0.0;
    }
    g_values_.resize(boundary_.cols());
    for (Eigen::Index k = 0; k < boundary_.cols(); ++k) {
        g_values_(k) = eval_g(g, boundary.angles[static_cast<std::size_t>(k)]);
    }
}

double FusedLoss::value_and_grad(std::span<const double> params, std::span<double> grad) {
    return evaluate(params, &grad);
}

double FusedLoss::value(std::span<const double> params) { return evaluate(params, nullptr); }

double FusedLoss::evaluate(std::span<const double> params, std::span<double>* grad) {
    net_.unflatten(params);
    const bool want_grad = grad != nullptr;

    const FieldBatch in = batch_forward(net_, interior_, Derivs::laplacian, &in_cache_);
    const Eigen::RowVectorXd r = in.lap - f_values_;
    const auto n_in = static_cast<double>(r.size());
    parts_.inside = r.squaredNorm() / n_in;

    const FieldBatch bd = batch_forward(net_, boundary_, Derivs::value, &bd_cache_);
    const Eigen::RowVectorXd e = bd.u - g_values_;
    const auto n_bd = static_cast<double>(e.size());
    parts_.boundary = e.squaredNorm() / n_bd;
    parts_.semi = w_.gamma != 0.0
                      ? discrete_seminorm(std::span<const double>(e.data(), e.size()))
                      : 0.0;
    parts_.total = w_.alpha * parts_.inside + w_.beta * parts_.boundary;
    if (w_.gamma != 0.0) {
        parts_.total += w_.gamma * parts_.semi;
    }

    if (want_grad) {
        std::span<double> g = *grad;
        if (g.size() != net_.parameter_count()) {
            throw StructuralError("gradient buffer has the wrong length");
        }
        std::fill(g.begin(), g.end(), 0.0);
        const Eigen::RowVectorXd bar_lap = (2.0 * w_.alpha / n_in) * r;
        batch_backward(net_, in_cache_, Eigen::RowVectorXd::Zero(r.size()), bar_lap, g);

        Eigen::RowVectorXd bar_u = (2.0 * w_.beta / n_bd) * e;
        if (w_.gamma != 0.0) {
            const Eigen::Index n = e.size();
            for (Eigen::Index k = 0; k < n; ++k) {
                const double prev1 = e((k + n - 1) % n);
                const double next1 = e((k + 1) % n);
                const double prev2 = e((k + n - 2) % n);
                const double next2 = e((k + 2) % n);
                const double ds = 2.0 * ((e(k) - prev1) - (next1 - e(k))) +
                                  2.0 * ((e(k) - prev2) - (next2 - e(k)));
                bar_u(k) += w_.gamma * ds;
            }
        }
        batch_backward(net_, bd_cache_, bar_u, Eigen::RowVectorXd(), g);
    }
    return parts_.total;
}

}  // namespace trpinn
