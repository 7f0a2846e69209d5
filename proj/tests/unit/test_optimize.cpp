#include <doctest.h>

#include <cmath>

#include "trpinn/error.hpp"
#include "trpinn/optimize.hpp"

using namespace trpinn;

namespace {

double rosenbrock(std::span<const double> x, std::span<double> g) {
    double f = 0.0;
    for (double& v : g) v = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        f += 100.0 * a * a + b * b;
        g[i] += -400.0 * x[i] * a - 2.0 * b;
        g[i + 1] += 200.0 * a;
    }
    return f;
}

// 0.5 x' D x - b' x with D = diag(1..n), b = 1; minimum at x_i = 1 / i.
double quadratic(std::span<const double> x, std::span<double> g) {
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = static_cast<double>(i + 1);
        f += 0.5 * d * x[i] * x[i] - x[i];
        g[i] = d * x[i] - 1.0;
    }
    return f;
}

}  // namespace

TEST_CASE("one Adam step by hand") {
    AdamState st(2, AdamConfig{});
    std::vector<double> p{1.0, -2.0};
    const std::vector<double> g{0.5, -4.0};
    adam_step(p, g, st);
    // After one step m_hat = g and v_hat = g^2, so the move is lr * g / (|g| + eps).
    CHECK(p[0] == doctest::Approx(1.0 - 1e-3 * 0.5 / (0.5 + 1e-8)).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(-2.0 + 1e-3 * 4.0 / (4.0 + 1e-8)).epsilon(1e-15));
    CHECK(st.t == 1);
    CHECK(st.m[0] == doctest::Approx(0.05));
    CHECK(st.v[1] == doctest::Approx(0.016));

    // Second step with the same gradient, bias correction by hand.
    const double m2 = 0.9 * 0.05 + 0.1 * 0.5;
    const double v2 = 0.999 * 0.00025 + 0.001 * 0.25;
    const double want = p[0] - 1e-3 * (m2 / (1 - 0.81)) / (std::sqrt(v2 / (1 - 0.999 * 0.999)) + 1e-8);
    adam_step(p, g, st);
    CHECK(p[0] == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("a non-finite gradient leaves Adam untouched") {
    AdamState st(3, AdamConfig{});
    std::vector<double> p{1.0, 2.0, 3.0};
    adam_step(p, std::vector<double>{0.1, 0.1, 0.1}, st);
    const auto p_before = p;
    const auto m_before = st.m;
    const auto v_before = st.v;
    CHECK_THROWS_AS(adam_step(p, std::vector<double>{0.1, NAN, 0.1}, st), NumericalError);
    CHECK(p == p_before);
    CHECK(st.m == m_before);
    CHECK(st.v == v_before);
    CHECK(st.t == 1);
    CHECK_THROWS_AS(adam_step(p, std::vector<double>{0.1}, st), StructuralError);
}

TEST_CASE("Adam converges on a quadratic") {
    AdamState st(4, AdamConfig{0.05, 0.9, 0.999, 1e-8});
    std::vector<double> p(4, 0.0);
    std::vector<double> g(4);
    for (int k = 0; k < 3000; ++k) {
        quadratic(p, g);
        adam_step(p, g, st);
    }
    for (std::size_t i = 0; i < 4; ++i) CHECK(p[i] == doctest::Approx(1.0 / (i + 1)).epsilon(1e-3));
}

TEST_CASE("L-BFGS solves Rosenbrock with Wolfe steps") {
    LbfgsOptions o;
    o.max_iterations = 500;
    o.grad_tol = 1e-10;
    o.rel_decrease_tol = 0.0;
    long observed = 0;
    const LbfgsResult r = lbfgs_minimize(rosenbrock, {-1.2, 1.0, -1.2, 1.0}, o,
                                         [&](const LbfgsIterate&, std::span<const double>) { ++observed; });
    for (const double x : r.params) CHECK(x == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.termination == Termination::gradient_tolerance);
    CHECK(observed == static_cast<long>(r.trace.size()));
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
        CHECK(r.trace[k].armijo);
        CHECK(r.trace[k].curvature);
        CHECK(r.trace[k].iteration == static_cast<long>(k + 1));
        if (k > 0) CHECK(r.trace[k].loss <= r.trace[k - 1].loss);
    }
}

TEST_CASE("L-BFGS on a quadratic reaches the exact minimizer") {
    LbfgsOptions o;
    o.grad_tol = 1e-9;
    const LbfgsResult r = lbfgs_minimize(quadratic, std::vector<double>(10, 3.0), o);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(r.params[i] == doctest::Approx(1.0 / static_cast<double>(i + 1)).epsilon(1e-8));
    }
    CHECK(r.termination == Termination::gradient_tolerance);
    std::vector<double> g(10);
    CHECK(r.loss == quadratic(r.params, g));
}

TEST_CASE("termination reasons") {
    SUBCASE("iteration cap") {
        LbfgsOptions o;
        o.max_iterations = 3;
        o.grad_tol = 0.0;
        o.rel_decrease_tol = 0.0;
        const LbfgsResult r = lbfgs_minimize(rosenbrock, {-1.2, 1.0}, o);
        CHECK(r.termination == Termination::max_iterations);
        CHECK(r.trace.size() == 3);
        CHECK(to_string(r.termination) == "max_iterations");
    }
    SUBCASE("already stationary") {
        const LbfgsResult r = lbfgs_minimize(rosenbrock, {1.0, 1.0}, LbfgsOptions{});
        CHECK(r.termination == Termination::gradient_tolerance);
        CHECK(r.trace.empty());
    }
    SUBCASE("stalled decrease") {
        LbfgsOptions o;
        o.grad_tol = 0.0;
        o.window = 2;
        o.rel_decrease_tol = 0.5;
        const LbfgsResult r = lbfgs_minimize(quadratic, std::vector<double>(5, 3.0), o);
        CHECK(r.termination == Termination::relative_decrease);
    }
    SUBCASE("non-finite start") {
        const Objective bad = [](std::span<const double>, std::span<double> g) {
            for (double& v : g) v = 0.0;
            return NAN;
        };
        CHECK(lbfgs_minimize(bad, {0.0}, LbfgsOptions{}).termination == Termination::non_finite);
    }
    SUBCASE("an ascent-only objective fails the line search") {
        // The reported gradient points the wrong way, so no step decreases f.
        const Objective liar = [](std::span<const double> x, std::span<double> g) {
            g[0] = -1.0;
            return x[0];
        };
        const LbfgsResult r = lbfgs_minimize(liar, {0.0}, LbfgsOptions{});
        CHECK(r.termination == Termination::line_search_failure);
        CHECK(r.params[0] == 0.0);
    }
}

TEST_CASE("the best point seen is returned") {
    LbfgsOptions o;
    o.max_iterations = 40;
    o.grad_tol = 0.0;
    o.rel_decrease_tol = 0.0;
    const LbfgsResult r = lbfgs_minimize(rosenbrock, {-1.2, 1.0}, o);
    double best = 1e300;
    for (const auto& it : r.trace) best = std::min(best, it.loss);
    CHECK(r.loss == best);
}

TEST_CASE("option validation") {
    LbfgsOptions o;
    o.c1 = 0.95;
    CHECK_THROWS_AS(o.validate(), ConfigError);
    o = LbfgsOptions{};
    o.history = 0;
    CHECK_THROWS_AS(o.validate(), ConfigError);
    o = LbfgsOptions{};
    o.window = 0;
    CHECK_THROWS_AS(o.validate(), ConfigError);
}
