#include "trpinn/ntk.hpp"

#include <algorithm>
#include <cmath>

#include "trpinn/error.hpp"

namespace trpinn {

SymmetricEigen jacobi_eigen(Eigen::MatrixXd a, bool want_vectors, double tol, int max_sweeps) {
    if (a.rows() != a.cols()) {
        throw StructuralError("jacobi_eigen needs a square matrix");
    }
    const Eigen::Index n = a.rows();
    // Work on the symmetrized upper triangle.
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            a(j, i) = a(i, j);
        }
    }
    Eigen::MatrixXd v;
    if (want_vectors) {
        v = Eigen::MatrixXd::Identity(n, n);
    }
    const double scale = a.norm();
    SymmetricEigen out;

    auto off_norm = [&] {
        double s = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = 0; i < j; ++i) {
                s += 2.0 * a(i, j) * a(i, j);
            }
        }
        return std::sqrt(s);
    };

    while (out.sweeps < max_sweeps && off_norm() > tol * scale) {
        ++out.sweeps;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // A <- J^T A J on columns then rows p, q (column-major friendly).
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                if (want_vectors) {
                    for (Eigen::Index k = 0; k < n; ++k) {
                        const double vkp = v(k, p);
                        const double vkq = v(k, q);
                        v(k, p) = c * vkp - s * vkq;
                        v(k, q) = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });
    out.values.resize(n);
    if (want_vectors) out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index src = order[static_cast<std::size_t>(i)];
        out.values(i) = a(src, src);
        if (want_vectors) out.vectors.col(i) = v.col(src);
    }
    return out;
}

Eigen::MatrixXd boundary_jacobian(const Mlp& mlp, const BoundarySet& boundary) {
    Eigen::MatrixXd j(static_cast<Eigen::Index>(boundary.size()),
                      static_cast<Eigen::Index>(mlp.parameter_count()));
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        ad::Tape tape;
        const TapedMlp net = bind_parameters(mlp, tape);
        const ad::Var u = forward_taped(net, boundary.points[i], tape);
        const auto g = ad::grad_params(u, tape, net.params);
        j.row(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::RowVectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
    }
    return j;
}

Eigen::MatrixXd residual_jacobian(const Mlp& mlp, std::span<const Point> points) {
    Eigen::MatrixXd j(static_cast<Eigen::Index>(points.size()),
                      static_cast<Eigen::Index>(mlp.parameter_count()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        ad::Tape tape;
        const TapedMlp net = bind_parameters(mlp, tape);
        const ad::Var lap = forward_dual2(net, points[i], tape).laplacian();
        const auto g = ad::grad_params(lap, tape, net.params);
        j.row(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::RowVectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
    }
    return j;
}

Eigen::MatrixXd KernelBlocks::full() const {
    const Eigen::Index nb = kbb.rows();
    const Eigen::Index nr = krr.rows();
    Eigen::MatrixXd k(nb + nr, nb + nr);
    k.topLeftCorner(nb, nb) = kbb;
    if (nr > 0) {
        k.topRightCorner(nb, nr) = kbr;
        k.bottomLeftCorner(nr, nb) = kbr.transpose();
        k.bottomRightCorner(nr, nr) = krr;
    }
    return k;
}

KernelBlocks kernel_blocks(const Mlp& mlp, const BoundarySet& boundary,
                           std::span<const Point> residual_points) {
    KernelBlocks kb;
    kb.jb = boundary_jacobian(mlp, boundary);
    kb.kbb = kb.jb * kb.jb.transpose();
    if (!residual_points.empty()) {
        kb.jr = residual_jacobian(mlp, residual_points);
        kb.krr = kb.jr * kb.jr.transpose();
        kb.kbr = kb.jb * kb.jr.transpose();
    }
    return kb;
}

DynamicsMatrixM build_m(std::size_t n_b, bool with_skip_pairs) {
    if (n_b < 3) {
        throw ConfigError("build_m needs N_b >= 3");
    }
    DynamicsMatrixM m;
    m.n = n_b;
    m.skip_pairs = with_skip_pairs;
    const auto n = static_cast<Eigen::Index>(n_b);
    m.first_row = Eigen::VectorXd::Zero(n);
    m.first_row(0) += 2.0 / static_cast<double>(n_b) + 4.0;
    m.first_row(1) -= 2.0;
    m.first_row(n - 1) -= 2.0;
    if (with_skip_pairs) {
        m.first_row(0) += 4.0;
        m.first_row(2 % n) -= 2.0;
        m.first_row((n - 2) % n) -= 2.0;
    }
    return m;
}

Eigen::MatrixXd DynamicsMatrixM::dense() const {
    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd d(nn, nn);
    for (Eigen::Index i = 0; i < nn; ++i) {
        for (Eigen::Index j = 0; j < nn; ++j) {
            d(i, j) = first_row((j - i + nn) % nn);
        }
    }
    return d;
}

Eigen::VectorXd DynamicsMatrixM::eigenvalues_closed_form() const {
    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::VectorXd ev(nn);
    for (Eigen::Index k = 0; k < nn; ++k) {
        const double w = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        ev(k) = 2.0 / static_cast<double>(n) + 4.0 - 4.0 * std::cos(w);
        if (skip_pairs) {
            ev(k) += 4.0 - 4.0 * std::cos(2.0 * w);
        }
    }
    return ev;
}

Eigen::MatrixXd circulant_function(const Eigen::VectorXd& first_row,
                                   const std::function<double(double)>& f) {
    const Eigen::Index n = first_row.size();
    const auto angle = [n](Eigen::Index j, Eigen::Index k) {
        return kTwoPi * static_cast<double>((j * k) % n) / static_cast<double>(n);
    };
    Eigen::VectorXd fl(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double lam = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) lam += first_row(j) * std::cos(angle(j, k));
        fl(k) = f(lam);
    }
    Eigen::VectorXd row(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) s += fl(k) * std::cos(angle(j, k));
        row(j) = s / static_cast<double>(n);
    }
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            d(i, j) = row((j - i + n) % n);
        }
    }
    return d;
}

namespace {

void check_symmetric(const Eigen::MatrixXd& k) {
    if (k.rows() != k.cols()) {
        throw StructuralError("kernel must be square");
    }
    const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
    if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw DataError("kernel is not symmetric");
    }
}

Eigen::VectorXd descending_top(const Eigen::VectorXd& ascending, std::size_t top_k) {
    const auto k = static_cast<Eigen::Index>(top_k);
    Eigen::VectorXd out(k);
    for (Eigen::Index i = 0; i < k; ++i) out(i) = ascending(ascending.size() - 1 - i);
    return out;
}

}  // namespace

SpectrumComparison spectrum_compare(const Eigen::MatrixXd& kbb, std::size_t top_k,
                                    bool with_skip_pairs) {
    check_symmetric(kbb);
    const auto n_b = static_cast<std::size_t>(kbb.rows());
    if (top_k > n_b) {
        throw ConfigError("top_k exceeds the number of boundary points");
    }
    const DynamicsMatrixM m = build_m(n_b, with_skip_pairs);
    const Eigen::MatrixXd msqrt =
        circulant_function(m.first_row, [](double l) { return std::sqrt(l); });
    const Eigen::MatrixXd kp = kbb / static_cast<double>(n_b);
    const Eigen::MatrixXd kh = msqrt * kbb * msqrt;
    SpectrumComparison sc;
    sc.lambda_p = descending_top(jacobi_eigen(kp, false).values, top_k);
    sc.lambda_h = descending_top(jacobi_eigen(kh, false).values, top_k);
    return sc;
}

Eigen::MatrixXd dynamics_scaling(std::size_t n_b, std::size_t n_r, bool trpinn,
                                 bool with_skip_pairs) {
    const auto nb = static_cast<Eigen::Index>(n_b);
    const auto nr = static_cast<Eigen::Index>(n_r);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(nb + nr, nb + nr);
    if (trpinn) {
        s.topLeftCorner(nb, nb) = build_m(n_b, with_skip_pairs).dense();
    } else {
        s.topLeftCorner(nb, nb).diagonal().setConstant(2.0 / static_cast<double>(n_b));
    }
    if (nr > 0) {
        s.bottomRightCorner(nr, nr).diagonal().setConstant(2.0 / static_cast<double>(n_r));
    }
    return s;
}

namespace {

Trajectory evolve(const Eigen::MatrixXd& k, const Eigen::MatrixXd& s_half,
                  const Eigen::MatrixXd& s_half_inv, const Eigen::VectorXd& r0,
                  std::span<const double> times) {
    const Eigen::MatrixXd b = s_half * k * s_half;
    const SymmetricEigen eig = jacobi_eigen(b, true);
    const Eigen::VectorXd coeff = eig.vectors.transpose() * (s_half * r0);
    Trajectory tr;
    tr.times.assign(times.begin(), times.end());
    tr.residuals.resize(r0.size(), static_cast<Eigen::Index>(times.size()));
    for (std::size_t i = 0; i < times.size(); ++i) {
        const Eigen::VectorXd decay = (-eig.values.array() * times[i]).exp();
        const Eigen::VectorXd r =
            s_half_inv * (eig.vectors * (decay.array() * coeff.array()).matrix());
        tr.residuals.col(static_cast<Eigen::Index>(i)) = r;
        tr.norms.push_back(r.norm());
    }
    return tr;
}

}  // namespace

DynamicsResult simulate_dynamics(const Eigen::MatrixXd& k, std::size_t n_b,
                                 const Eigen::VectorXd& initial_residual,
                                 std::span<const double> times, bool with_skip_pairs) {
    check_symmetric(k);
    const Eigen::Index n = k.rows();
    if (static_cast<Eigen::Index>(n_b) > n || initial_residual.size() != n) {
        throw StructuralError("simulate_dynamics: block sizes do not match the kernel");
    }
    const SymmetricEigen ke = jacobi_eigen(k, false);
    const double knorm = std::max(std::abs(ke.values(0)), std::abs(ke.values(n - 1)));
    if (ke.values(0) < -1e-10 * knorm) {
        throw DataError("kernel is not positive semi-definite");
    }
    const std::size_t n_r = static_cast<std::size_t>(n) - n_b;
    const auto nb = static_cast<Eigen::Index>(n_b);
    const auto nr = static_cast<Eigen::Index>(n_r);

    DynamicsResult res;
    {
        Eigen::MatrixXd sh = Eigen::MatrixXd::Zero(n, n);
        Eigen::MatrixXd shi = Eigen::MatrixXd::Zero(n, n);
        sh.topLeftCorner(nb, nb).diagonal().setConstant(std::sqrt(2.0 / static_cast<double>(n_b)));
        shi.topLeftCorner(nb, nb).diagonal().setConstant(
            std::sqrt(static_cast<double>(n_b) / 2.0));
        if (nr > 0) {
            sh.bottomRightCorner(nr, nr).diagonal().setConstant(
                std::sqrt(2.0 / static_cast<double>(n_r)));
            shi.bottomRightCorner(nr, nr).diagonal().setConstant(
                std::sqrt(static_cast<double>(n_r) / 2.0));
        }
        res.pinn = evolve(k, sh, shi, initial_residual, times);
    }
    {
        const DynamicsMatrixM m = build_m(n_b, with_skip_pairs);
        Eigen::MatrixXd sh = Eigen::MatrixXd::Zero(n, n);
        Eigen::MatrixXd shi = Eigen::MatrixXd::Zero(n, n);
        sh.topLeftCorner(nb, nb) =
            circulant_function(m.first_row, [](double l) { return std::sqrt(l); });
        shi.topLeftCorner(nb, nb) =
            circulant_function(m.first_row, [](double l) { return 1.0 / std::sqrt(l); });
        if (nr > 0) {
            sh.bottomRightCorner(nr, nr).diagonal().setConstant(
                std::sqrt(2.0 / static_cast<double>(n_r)));
            shi.bottomRightCorner(nr, nr).diagonal().setConstant(
                std::sqrt(static_cast<double>(n_r) / 2.0));
        }
        res.trpinn = evolve(k, sh, shi, initial_residual, times);
    }
    return res;
}

}  // namespace trpinn
