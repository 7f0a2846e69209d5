#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "trpinn/error.hpp"
#include "trpinn/losses.hpp"

using namespace trpinn;

namespace {

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n) {
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (auto& x : v) x = d(gen);
    return v;
}

double taped_total(const Mlp& m, const InteriorSet& in, const BoundarySet& bd,
                   const BoundaryFunction& g, const SourceFn& f, const LossWeights& w) {
    ad::Tape t;
    const TapedMlp net = bind_parameters(m, t);
    return loss_total(net, in, bd, g, f, w, t).value();
}

}  // namespace

TEST_CASE("semi-norm hand cases") {
    const std::vector<double> spike{1.0, 0.0, 0.0, 0.0};
    CHECK(discrete_seminorm(spike) == 4.0);
    const std::vector<double> alternating{1.0, -1.0, 1.0, -1.0};
    CHECK(discrete_seminorm(alternating) == 16.0);
    const std::vector<double> constant(9, 2.5);
    CHECK(discrete_seminorm(constant) == 0.0);
    const std::vector<double> three{0.0, 1.0, 3.0};
    // Adjacent: 1 + 4 + 9; skip pairs (wrapping): 9 + 1 + 4.
    CHECK(discrete_seminorm(three) == 28.0);
}

TEST_CASE("semi-norm invariances on random vectors") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(trial % 40);
        const auto e = random_vector(gen, n);
        const double s = discrete_seminorm(e);
        CHECK(s >= 0.0);

        std::vector<double> shifted(n);
        for (std::size_t i = 0; i < n; ++i) shifted[i] = e[(i + 1 + trial) % n];
        CHECK(discrete_seminorm(shifted) == doctest::Approx(s).epsilon(1e-12));

        const std::vector<double> reversed(e.rbegin(), e.rend());
        CHECK(discrete_seminorm(reversed) == doctest::Approx(s).epsilon(1e-12));

        std::vector<double> translated = e;
        for (auto& x : translated) x += 3.75;
        CHECK(discrete_seminorm(translated) == doctest::Approx(s).epsilon(1e-10));

        std::vector<double> scaled = e;
        for (auto& x : scaled) x *= -2.0;
        CHECK(discrete_seminorm(scaled) == doctest::Approx(4.0 * s).epsilon(1e-12));
    }
}

TEST_CASE("semi-norm taped value and gradient") {
    std::mt19937_64 gen(4);
    const auto e = random_vector(gen, 11);
    ad::Tape tape;
    std::vector<ad::Var> vars;
    for (const double x : e) vars.push_back(tape.variable(x));
    const ad::Var s = discrete_seminorm(vars);
    CHECK(s.value() == doctest::Approx(discrete_seminorm(e)).epsilon(1e-14));
    const auto g = ad::grad_params(s, tape, vars);
    const auto fd = testing::central_gradient(
        [](std::span<const double> x) { return discrete_seminorm(x); }, e, 1e-6);
    CHECK(testing::worst_gradient_error(g, fd, 1e-6) < 1e-7);
}

TEST_CASE("semi-norm needs three samples") {
    const std::vector<double> two{1.0, 2.0};
    CHECK_THROWS_AS(discrete_seminorm(two), ConfigError);
    ad::Tape tape;
    const std::vector<ad::Var> vars{tape.variable(1.0), tape.variable(2.0)};
    CHECK_THROWS_AS(discrete_seminorm(vars), ConfigError);
}

TEST_CASE("weights are validated") {
    CHECK_THROWS_AS((LossWeights{-1.0, 1.0, 0.0}.validate()), ConfigError);
    CHECK_THROWS_AS((LossWeights{1.0, NAN, 0.0}.validate()), ConfigError);
    CHECK_NOTHROW((LossWeights{0.0, 0.0, 0.0}.validate()));
}

TEST_CASE("interior residual loss") {
    const InteriorSet in = sample_interior(8, 2);
    SUBCASE("zero network with zero source") {
        const std::vector<std::size_t> sizes{2, 4, 1};
        ad::Tape tape;
        const TapedMlp net = bind_parameters(zero_mlp(sizes), tape);
        CHECK(loss_inside(net, in, {}, tape).value() == 0.0);
    }
    SUBCASE("affine network has zero residual, a constant source gives its square") {
        const std::vector<std::size_t> sizes{2, 1};
        ad::Tape tape;
        const TapedMlp net = bind_parameters(init_mlp(sizes, 3), tape);
        CHECK(loss_inside(net, in, {}, tape).value() == 0.0);
        const SourceFn f = [](Point) { return 3.0; };
        CHECK(loss_inside(net, in, f, tape).value() == doctest::Approx(9.0).epsilon(1e-15));
    }
    SUBCASE("matches a finite-difference Laplacian script") {
        const std::vector<std::size_t> sizes{2, 6, 6, 1};
        const Mlp m = init_mlp(sizes, 4);
        const SourceFn f = [](Point p) { return p.x1 * p.x2; };
        double want = 0.0;
        const double h = 1e-3;
        for (const Point p : in.points) {
            const double lap = (forward(m, {p.x1 + h, p.x2}) + forward(m, {p.x1 - h, p.x2}) +
                                forward(m, {p.x1, p.x2 + h}) + forward(m, {p.x1, p.x2 - h}) -
                                4.0 * forward(m, p)) /
                               (h * h);
            want += (lap - f(p)) * (lap - f(p));
        }
        want /= 8.0;
        ad::Tape tape;
        const TapedMlp net = bind_parameters(m, tape);
        CHECK(loss_inside(net, in, f, tape).value() == doctest::Approx(want).epsilon(1e-4));
    }
}

TEST_CASE("boundary mismatch loss") {
    const BoundarySet bd = sample_boundary(BoundaryMethod::linspace, 6, 0);
    const std::vector<std::size_t> sizes{2, 5, 1};
    const BoundaryFunction g = BoundaryFunction::sin(2);
    SUBCASE("zero network against zero data") {
        ad::Tape tape;
        const TapedMlp net = bind_parameters(zero_mlp(sizes), tape);
        const auto zero_g = BoundaryFunction::from_samples({0.0});
        CHECK(loss_boundary_l2(net, bd, zero_g, tape).value() == 0.0);
    }
    SUBCASE("constant offset of one") {
        Mlp m = zero_mlp(sizes);
        m.biases[1](0) = 1.0;
        ad::Tape tape;
        const TapedMlp net = bind_parameters(m, tape);
        const auto zero_g = BoundaryFunction::from_samples({0.0});
        CHECK(loss_boundary_l2(net, bd, zero_g, tape).value() == 1.0);
    }
    SUBCASE("equals the mean of squared residuals computed directly") {
        const Mlp m = init_mlp(sizes, 6);
        double sum = 0.0;
        for (std::size_t i = 0; i < bd.size(); ++i) {
            const double r = forward(m, bd.points[i]) - eval_g(g, bd.angles[i]);
            sum += r * r;
        }
        ad::Tape tape;
        const TapedMlp net = bind_parameters(m, tape);
        CHECK(loss_boundary_l2(net, bd, g, tape).value() == sum * (1.0 / 6.0));
    }
}

TEST_CASE("gamma = 0 is exactly the vanilla loss and weights recompose") {
    const std::vector<std::size_t> sizes{2, 6, 6, 1};
    const Mlp m = init_mlp(sizes, 8);
    const InteriorSet in = sample_interior(12, 5);
    const BoundarySet bd = sample_boundary(BoundaryMethod::randomized, 9, 5);
    const BoundaryFunction g = BoundaryFunction::sharp(2);

    ad::Tape tape;
    const TapedMlp net = bind_parameters(m, tape);
    const double inside = loss_inside(net, in, {}, tape).value();
    const double bl2 = loss_boundary_l2(net, bd, g, tape).value();
    std::vector<double> e;
    for (std::size_t i = 0; i < bd.size(); ++i) {
        e.push_back(forward(m, bd.points[i]) - eval_g(g, bd.angles[i]));
    }
    const double semi = discrete_seminorm(e);

    const double vanilla = taped_total(m, in, bd, g, {}, {1.0, 1.0, 0.0});
    CHECK(vanilla == inside + bl2);
    const double mixed = taped_total(m, in, bd, g, {}, {1.0, 0.5, 0.5});
    CHECK(mixed == doctest::Approx(inside + 0.5 * bl2 + 0.5 * semi).epsilon(1e-13));

    FusedLoss fused(m, in, bd, g, {}, {1.0, 1.0, 0.0});
    CHECK(fused.value(m.flatten()) == doctest::Approx(vanilla).epsilon(1e-12));
    CHECK(fused.last_parts().semi == 0.0);
}

TEST_CASE("fused batched loss agrees with the tape and with finite differences") {
    const std::vector<std::size_t> sizes{2, 7, 7, 1};
    const Mlp m = init_mlp(sizes, 13);
    const InteriorSet in = sample_interior(25, 6);
    const BoundarySet bd = sample_boundary(BoundaryMethod::uniform, 17, 6);
    const BoundaryFunction g = BoundaryFunction::sin(3);
    const SourceFn f = [](Point p) { return std::sin(p.x1) + p.x2; };
    const LossWeights w{1.0, 50.0, 50.0};

    ad::Tape tape;
    const TapedMlp net = bind_parameters(m, tape);
    const ad::Var total = loss_total(net, in, bd, g, f, w, tape);
    const auto want = ad::grad_params(total, tape, net.params);

    FusedLoss fused(m, in, bd, g, f, w);
    std::vector<double> got(fused.parameter_count());
    const double value = fused.value_and_grad(m.flatten(), got);
    CHECK(value == doctest::Approx(total.value()).epsilon(1e-12));
    CHECK(testing::worst_gradient_error(got, want, 1e-9) < 1e-10);
    const auto& parts = fused.last_parts();
    CHECK(parts.total == value);
    CHECK(w.alpha * parts.inside + w.beta * parts.boundary + w.gamma * parts.semi ==
          doctest::Approx(value).epsilon(1e-14));

    // Repeat calls reuse cached buffers and must give identical results.
    std::vector<double> again(got.size());
    CHECK(fused.value_and_grad(m.flatten(), again) == value);
    CHECK(again == got);

    const auto fd = testing::central_gradient(
        [&](std::span<const double> p) { return fused.value(p); }, m.flatten(), 1e-5);
    CHECK(testing::worst_gradient_error(got, fd, 1e-6) < 1e-5);

    std::vector<double> short_grad(3);
    CHECK_THROWS_AS(fused.value_and_grad(m.flatten(), short_grad), StructuralError);
}

TEST_CASE("fused loss rejects degenerate point sets") {
    const std::vector<std::size_t> sizes{2, 3, 1};
    const Mlp m = init_mlp(sizes, 1);
    const BoundarySet bd = sample_boundary(BoundaryMethod::linspace, 5, 0);
    const BoundaryFunction g = BoundaryFunction::sin(1);
    CHECK_THROWS_AS(FusedLoss(m, InteriorSet{}, bd, g, {}, {1, 1, 1}), ConfigError);
}
