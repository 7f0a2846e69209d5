#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace trpinn {

/// Loss at `params`, gradient written into `grad` (same length).
using Objective = std::function<double(std::span<const double> params, std::span<double> grad)>;

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::vector<double> m;
    std::vector<double> v;
    long t = 0;

    AdamState() = default;
    AdamState(std::size_t n, AdamConfig cfg) : config(cfg), m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update. A non-finite gradient aborts the step
/// (params and state untouched) with a NumericalError.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state);

struct LbfgsOptions {
    std::size_t history = 10;
    double c1 = 1e-4;
    double c2 = 0.9;
    int max_linesearch = 30;
    double grad_tol = 1e-9;           // on the infinity norm
    double rel_decrease_tol = 1e-12;  // over `window` iterations
    std::size_t window = 10;
    long max_iterations = 500;

    void validate() const;
};

enum class Termination {
    gradient_tolerance,
    relative_decrease,
    line_search_failure,
    max_iterations,
    non_finite,
};

std::string_view to_string(Termination t);

/// One accepted L-BFGS iteration.
struct LbfgsIterate {
    long iteration = 0;  // 1-based
    double loss = 0.0;
    double grad_norm = 0.0;  // infinity norm
    double step = 0.0;
    bool armijo = false;
    bool curvature = false;
    int evaluations = 0;  // objective calls in this iteration's line search
};

struct LbfgsResult {
    std::vector<double> params;  // best seen
    double loss = 0.0;           // loss at `params`
    Termination termination = Termination::max_iterations;
    std::vector<LbfgsIterate> trace;
    long skipped_pairs = 0;  // (s, y) pairs rejected for s'y <= 0
};

/// Called after every accepted iteration with the current parameters.
using LbfgsObserver = std::function<void(const LbfgsIterate&, std::span<const double>)>;

/// Limited-memory BFGS with a two-loop recursion and a strong-Wolfe line
/// search (bracketing then cubic-interpolation zoom).
LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> params,
                           const LbfgsOptions& options, const LbfgsObserver& observer = {});

}  // namespace trpinn
