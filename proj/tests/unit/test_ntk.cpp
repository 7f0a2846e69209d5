#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "trpinn/error.hpp"
#include "trpinn/ntk.hpp"

using namespace trpinn;

namespace {

Eigen::MatrixXd random_psd(std::mt19937_64& gen, Eigen::Index n, Eigen::Index rank) {
    std::normal_distribution<double> d;
    Eigen::MatrixXd a(n, rank);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = d(gen);
    return a * a.transpose();
}

Eigen::MatrixXd random_symmetric(std::mt19937_64& gen, Eigen::Index n) {
    std::normal_distribution<double> d;
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = d(gen);
    return 0.5 * (a + a.transpose());
}

}  // namespace

TEST_CASE("Jacobi on hand spectra") {
    SUBCASE("3x3 with eigenvalues 1, 2, 4") {
        Eigen::Matrix3d a;
        a << 2, 0, 0, 0, 3, 1, 0, 1, 3;
        const SymmetricEigen e = jacobi_eigen(a);
        CHECK(e.values(0) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(e.values(1) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(e.values(2) == doctest::Approx(4.0).epsilon(1e-14));
    }
    SUBCASE("4x4 path Laplacian") {
        Eigen::Matrix4d a;
        a << 1, -1, 0, 0, -1, 2, -1, 0, 0, -1, 2, -1, 0, 0, -1, 1;
        const SymmetricEigen e = jacobi_eigen(a);
        for (int k = 0; k < 4; ++k) {
            const double want = 2.0 - 2.0 * std::cos(std::numbers::pi * k / 4.0);
            CHECK(std::abs(e.values(k) - want) < 1e-13);
        }
        CHECK((a * e.vectors - e.vectors * e.values.asDiagonal()).norm() < 1e-12);
        CHECK((e.vectors.transpose() * e.vectors - Eigen::Matrix4d::Identity()).norm() < 1e-12);
    }
    SUBCASE("diagonal input needs no sweep") {
        const Eigen::Vector3d diag(3.0, -1.0, 2.0);
        const SymmetricEigen e = jacobi_eigen(diag.asDiagonal().toDenseMatrix());
        CHECK(e.values == Eigen::Vector3d(-1.0, 2.0, 3.0));
        CHECK(e.sweeps == 0);
    }
    CHECK_THROWS_AS(jacobi_eigen(Eigen::MatrixXd(2, 3)), StructuralError);
}

TEST_CASE("Jacobi agrees with a library eigensolver on random matrices") {
    std::mt19937_64 gen(17);
    for (const Eigen::Index n : {5, 20, 60}) {
        const Eigen::MatrixXd a = random_symmetric(gen, n);
        const SymmetricEigen e = jacobi_eigen(a);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
        CHECK((e.values - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-11 * a.norm());
        CHECK((a * e.vectors - e.vectors * e.values.asDiagonal()).norm() < 1e-10 * a.norm());
    }
}

TEST_CASE("the dynamics matrix") {
    const DynamicsMatrixM m4 = build_m(4);
    CHECK(m4.first_row(0) == doctest::Approx(2.0 / 4 + 4).epsilon(1e-15));
    CHECK(m4.first_row(1) == -2.0);
    CHECK(m4.first_row(2) == 0.0);
    CHECK(m4.first_row(3) == -2.0);
    const Eigen::MatrixXd d = m4.dense();
    CHECK(d(2, 1) == -2.0);
    CHECK(d(0, 3) == -2.0);
    CHECK(d.isApprox(d.transpose()));

    for (const std::size_t n : {4u, 51u, 201u}) {
        for (const bool skip : {false, true}) {
            const DynamicsMatrixM m = build_m(n, skip);
            const Eigen::VectorXd got = jacobi_eigen(m.dense(), false).values;
            Eigen::VectorXd want = m.eigenvalues_closed_form();
            std::sort(want.data(), want.data() + want.size());
            CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(got(0) == doctest::Approx(2.0 / static_cast<double>(n)).epsilon(1e-9));
        }
    }
    const DynamicsMatrixM s = build_m(6, true);
    CHECK(s.first_row(0) == doctest::Approx(2.0 / 6 + 8).epsilon(1e-15));
    CHECK(s.first_row(2) == -2.0);
    CHECK(s.first_row(4) == -2.0);
    CHECK_THROWS_AS(build_m(2), ConfigError);
}

TEST_CASE("circulant functions") {
    const DynamicsMatrixM m = build_m(9);
    const Eigen::MatrixXd root = circulant_function(m.first_row, [](double l) { return std::sqrt(l); });
    CHECK((root * root - m.dense()).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::MatrixXd id = circulant_function(m.first_row, [](double) { return 1.0; });
    CHECK((id - Eigen::MatrixXd::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-14);
    const Eigen::MatrixXd inv = circulant_function(m.first_row, [](double l) { return 1.0 / l; });
    CHECK((inv * m.dense() - Eigen::MatrixXd::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("boundary Jacobian of an affine network is (cos, sin, 1)") {
    const std::vector<std::size_t> sizes{2, 1};
    const Mlp m = init_mlp(sizes, 2);
    const BoundarySet bd = sample_boundary(BoundaryMethod::linspace, 7, 0);
    const Eigen::MatrixXd j = boundary_jacobian(m, bd);
    REQUIRE(j.rows() == 7);
    REQUIRE(j.cols() == 3);
    for (Eigen::Index i = 0; i < 7; ++i) {
        CHECK(j(i, 0) == bd.points[static_cast<std::size_t>(i)].x1);
        CHECK(j(i, 1) == bd.points[static_cast<std::size_t>(i)].x2);
        CHECK(j(i, 2) == 1.0);
    }
}

TEST_CASE("Jacobians match finite differences") {
    const std::vector<std::size_t> sizes{2, 5, 4, 1};
    const Mlp m = init_mlp(sizes, 9);
    const BoundarySet bd = sample_boundary(BoundaryMethod::uniform, 6, 3);
    const std::vector<Point> pts{{0.1, 0.2}, {-0.4, 0.3}, {0.0, -0.6}};
    const Eigen::MatrixXd jb = boundary_jacobian(m, bd);
    const Eigen::MatrixXd jr = residual_jacobian(m, pts);
    const auto flat = m.flatten();
    const double h = 1e-6;
    const auto lap = [](const Mlp& net, Point p) {
        ad::Tape t;
        return forward_dual2(bind_parameters(net, t), p, t).laplacian().value();
    };
    for (std::size_t q = 0; q < flat.size(); ++q) {
        Mlp plus = m;
        Mlp minus = m;
        auto fp = flat;
        auto fm = flat;
        fp[q] += h;
        fm[q] -= h;
        plus.unflatten(fp);
        minus.unflatten(fm);
        const auto c = static_cast<Eigen::Index>(q);
        for (std::size_t i = 0; i < bd.size(); ++i) {
            const double fd = (forward(plus, bd.points[i]) - forward(minus, bd.points[i])) / (2 * h);
            CHECK(std::abs(jb(static_cast<Eigen::Index>(i), c) - fd) < 1e-7);
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double fd = (lap(plus, pts[i]) - lap(minus, pts[i])) / (2 * h);
            CHECK(std::abs(jr(static_cast<Eigen::Index>(i), c) - fd) < 1e-6);
        }
    }
    // The output bias moves u by one everywhere and never touches the Laplacian.
    CHECK(jb.col(jb.cols() - 1).isOnes(0.0));
    CHECK(jr.col(jr.cols() - 1).isZero(0.0));

    const KernelBlocks kb = kernel_blocks(m, bd, pts);
    CHECK(kb.n_b() == 6);
    CHECK(kb.n_r() == 3);
    Eigen::MatrixXd j(9, jb.cols());
    j << jb, jr;
    CHECK((kb.full() - j * j.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(kernel_blocks(m, bd).n_r() == 0);
}

TEST_CASE("spectra for the identity and a rank-one kernel") {
    const std::size_t n = 24;
    const SpectrumComparison id = spectrum_compare(Eigen::MatrixXd::Identity(24, 24), n);
    Eigen::VectorXd want = build_m(n).eigenvalues_closed_form();
    std::sort(want.data(), want.data() + want.size(), std::greater<>());
    CHECK((id.lambda_h - want).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((id.lambda_p.array() - 1.0 / 24).abs().maxCoeff() < 1e-15);

    Eigen::VectorXd v(24);
    for (Eigen::Index i = 0; i < 24; ++i) v(i) = std::cos(0.3 * static_cast<double>(i)) + 0.1;
    const SpectrumComparison r1 = spectrum_compare(v * v.transpose(), 3);
    CHECK(r1.lambda_p(0) == doctest::Approx(v.squaredNorm() / 24).epsilon(1e-12));
    CHECK(r1.lambda_h(0) == doctest::Approx(v.dot(build_m(n).dense() * v)).epsilon(1e-12));
    CHECK(std::abs(r1.lambda_h(1)) < 1e-10 * r1.lambda_h(0));
}

TEST_CASE("the trace-regularized spectrum dominates on random PSD kernels") {
    std::mt19937_64 gen(23);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 10 + trial;
        const Eigen::MatrixXd k = random_psd(gen, n, 1 + trial % 7);
        const SpectrumComparison sc = spectrum_compare(k, static_cast<std::size_t>(n));
        // M >= (2/N) I, so each eigenvalue at least doubles.
        const double tol = 1e-10 * sc.lambda_h(0);
        CHECK(((sc.lambda_h - 2.0 * sc.lambda_p).array() >= -tol).all());
    }
}

TEST_CASE("dominance holds on a real network kernel") {
    const std::vector<std::size_t> sizes{2, 32, 32, 32, 1};
    const Mlp m = init_mlp(sizes, 1);
    const BoundarySet bd = sample_boundary(BoundaryMethod::linspace, 64, 0);
    const KernelBlocks kb = kernel_blocks(m, bd);
    const SpectrumComparison sc = spectrum_compare(kb.kbb, 64);
    const double tol = 1e-10 * sc.lambda_h(0);
    CHECK(((sc.lambda_h - sc.lambda_p).array() >= -tol).all());
    CHECK(sc.lambda_h(0) > sc.lambda_p(0));
}

TEST_CASE("spectrum errors") {
    Eigen::MatrixXd k = Eigen::MatrixXd::Identity(5, 5);
    CHECK_THROWS_AS(spectrum_compare(k, 6), ConfigError);
    k(0, 1) = 1e-3;
    CHECK_THROWS_AS(spectrum_compare(k, 2), DataError);
}

TEST_CASE("scalar decay of the linearized flow") {
    const double c = 1.5;
    const Eigen::MatrixXd k = c * Eigen::MatrixXd::Identity(3, 3);
    const Eigen::VectorXd r0 = Eigen::Vector3d(1.0, -2.0, 0.5);
    const std::vector<double> times{0.0, 0.5, 2.0};
    const DynamicsResult d = simulate_dynamics(k, 3, r0, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const Eigen::VectorXd want = std::exp(-c * 2.0 / 3.0 * times[i]) * r0;
        const Eigen::VectorXd got = d.pinn.residuals.col(static_cast<Eigen::Index>(i));
        CHECK((got - want).cwiseAbs().maxCoeff() < 1e-13);
        CHECK(d.trpinn.norms[i] <= d.pinn.norms[i] * (1 + 1e-12));
    }
    CHECK(d.pinn.norms[0] == doctest::Approx(r0.norm()).epsilon(1e-14));
}

TEST_CASE("exact flow matches explicit Euler") {
    std::mt19937_64 gen(5);
    const Eigen::MatrixXd k = random_psd(gen, 7, 7) * 0.3;
    const std::size_t n_b = 4;
    Eigen::VectorXd r0(7);
    r0 << 1.0, -0.5, 0.25, 2.0, -1.0, 0.3, 0.7;
    const std::vector<double> times{1.0};
    const DynamicsResult d = simulate_dynamics(k, n_b, r0, times);
    for (const bool tr : {false, true}) {
        const Eigen::MatrixXd ks = k * dynamics_scaling(n_b, 3, tr);
        Eigen::VectorXd r = r0;
        const double dt = 1e-4;
        for (int step = 0; step < 10000; ++step) r -= dt * (ks * r);
        const Eigen::VectorXd exact = (tr ? d.trpinn : d.pinn).residuals.col(0);
        CHECK((r - exact).norm() / exact.norm() < 1e-3);
    }
}

TEST_CASE("with the identity kernel the trace-regularized residual decays faster") {
    const std::size_t n_b = 16;
    const Eigen::MatrixXd k = Eigen::MatrixXd::Identity(20, 20);
    std::mt19937_64 gen(2);
    std::normal_distribution<double> dist;
    Eigen::VectorXd r0(20);
    for (Eigen::Index i = 0; i < 20; ++i) r0(i) = dist(gen);
    std::vector<double> times;
    for (int i = 0; i <= 50; ++i) times.push_back(0.2 * i);
    const DynamicsResult d = simulate_dynamics(k, n_b, r0, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(d.trpinn.norms[i] <= d.pinn.norms[i] * (1 + 1e-12));
    }
}

TEST_CASE("dynamics errors") {
    const Eigen::MatrixXd k = Eigen::MatrixXd::Identity(5, 5);
    const std::vector<double> times{0.0};
    CHECK_THROWS_AS(simulate_dynamics(k, 3, Eigen::VectorXd::Zero(4), times), StructuralError);
    Eigen::MatrixXd neg = k;
    neg(4, 4) = -1.0;
    CHECK_THROWS_AS(simulate_dynamics(neg, 3, Eigen::VectorXd::Zero(5), times), DataError);
}
