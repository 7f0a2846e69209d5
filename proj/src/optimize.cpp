#include "trpinn/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trpinn/error.hpp"

namespace trpinn {

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state) {
    const std::size_t n = params.size();
    if (grad.size() != n || state.m.size() != n || state.v.size() != n) {
        throw StructuralError("adam_step: parameter, gradient and moment lengths differ");
    }
    for (const double g : grad) {
        if (!std::isfinite(g)) {
            throw NumericalError("adam", state.t + 1, "non-finite gradient");
        }
    }
    const AdamConfig& c = state.config;
    state.t += 1;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < n; ++i) {
        state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * grad[i];
        state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * grad[i] * grad[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
}

void LbfgsOptions::validate() const {
    if (history == 0) throw ConfigError("lbfgs history must be >= 1");
    if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0)) {
        throw ConfigError("lbfgs line search needs 0 < c1 < c2 < 1");
    }
    if (max_linesearch < 1) throw ConfigError("lbfgs max_linesearch must be >= 1");
    if (window == 0) throw ConfigError("lbfgs window must be >= 1");
    if (max_iterations < 0) throw ConfigError("lbfgs max_iterations must be >= 0");
}

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::gradient_tolerance:
            return "gradient_tolerance";
        case Termination::relative_decrease:
            return "relative_decrease";
        case Termination::line_search_failure:
            return "line_search_failure";
        case Termination::max_iterations:
            return "max_iterations";
        case Termination::non_finite:
            return "non_finite";
    }
    return "?";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_inf(std::span<const double> a) {
    double s = 0.0;
    for (const double v : a) s = std::max(s, std::abs(v));
    return s;
}

struct Trial {
    double alpha = 0.0;
    double f = 0.0;
    double dphi = 0.0;
    std::vector<double> x;
    std::vector<double> g;
};

struct LineSearchOutcome {
    bool ok = false;
    Trial point;
    int evaluations = 0;
};

// Minimizer of the cubic through (a, fa, da), (b, fb, db), falling back to
// bisection when the interpolant is degenerate. Result is clamped into the
// interior of [a, b] so the bracket always shrinks.
double cubic_step(double a, double fa, double da, double b, double fb, double db) {
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    const double margin = 0.1 * (hi - lo);
    const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - da * db;
    double t = 0.5 * (a + b);
    if (disc >= 0.0 && std::isfinite(disc)) {
        const double d2 = std::copysign(std::sqrt(disc), b - a);
        const double denom = db - da + 2.0 * d2;
        if (denom != 0.0) {
            const double cand = b - (b - a) * (db + d2 - d1) / denom;
            if (std::isfinite(cand)) t = cand;
        }
    }
    return std::clamp(t, lo + margin, hi - margin);
}

class LineSearch {
  public:
    LineSearch(const Objective& f, const LbfgsOptions& o, std::span<const double> x0, double f0,
               std::span<const double> d, double dphi0)
        : f_(f), o_(o), x0_(x0), f0_(f0), d_(d), dphi0_(dphi0) {}

    LineSearchOutcome run(double alpha0) {
        LineSearchOutcome out;
        Trial prev{0.0, f0_, dphi0_, {}, {}};
        double alpha = alpha0;
        for (int i = 0; i < o_.max_linesearch; ++i) {
            Trial cur = eval(alpha);
            if (!std::isfinite(cur.f) || !std::isfinite(cur.dphi)) {
                // Backtrack towards the last finite point.
                alpha = prev.alpha + 0.5 * (alpha - prev.alpha);
                continue;
            }
            if (cur.f > f0_ + o_.c1 * cur.alpha * dphi0_ || (i > 0 && cur.f >= prev.f)) {
                return zoom(std::move(prev), std::move(cur));
            }
            if (std::abs(cur.dphi) <= -o_.c2 * dphi0_) {
                out.ok = true;
                out.point = std::move(cur);
                out.evaluations = evals_;
                return out;
            }
            if (cur.dphi >= 0.0) {
                return zoom(std::move(cur), std::move(prev));
            }
            prev = std::move(cur);
            alpha *= 2.0;
        }
        out.evaluations = evals_;
        return out;
    }

  private:
    Trial eval(double alpha) {
        Trial t;
        t.alpha = alpha;
        t.x.resize(x0_.size());
        t.g.resize(x0_.size());
        for (std::size_t i = 0; i < x0_.size(); ++i) t.x[i] = x0_[i] + alpha * d_[i];
        t.f = f_(t.x, t.g);
        t.dphi = dot(t.g, d_);
        ++evals_;
        return t;
    }

    LineSearchOutcome zoom(Trial lo, Trial hi) {
        LineSearchOutcome out;
        while (evals_ < o_.max_linesearch) {
            if (std::abs(hi.alpha - lo.alpha) <= 1e-16 * std::max(1.0, std::abs(lo.alpha))) {
                break;
            }
            const double alpha = cubic_step(lo.alpha, lo.f, lo.dphi, hi.alpha, hi.f, hi.dphi);
            Trial cur = eval(alpha);
            if (!std::isfinite(cur.f) || !std::isfinite(cur.dphi) ||
                cur.f > f0_ + o_.c1 * cur.alpha * dphi0_ || cur.f >= lo.f) {
                if (!std::isfinite(cur.f) || !std::isfinite(cur.dphi)) {
                    // Keep the bracket finite: treat as a too-long step.
                    cur.f = std::numeric_limits<double>::max();
                    cur.dphi = 0.0;
                }
                hi = std::move(cur);
                continue;
            }
            if (std::abs(cur.dphi) <= -o_.c2 * dphi0_) {
                out.ok = true;
                out.point = std::move(cur);
                out.evaluations = evals_;
                return out;
            }
            if (cur.dphi * (hi.alpha - lo.alpha) >= 0.0) {
                hi = std::move(lo);
            }
            lo = std::move(cur);
        }
        out.evaluations = evals_;
        return out;
    }

    const Objective& f_;
    const LbfgsOptions& o_;
    std::span<const double> x0_;
    double f0_;
    std::span<const double> d_;
    double dphi0_;
    int evals_ = 0;
};

struct Pair {
    std::vector<double> s, y;
    double rho;
};

// Two-loop recursion: d = -H g.
std::vector<double> direction(const std::deque<Pair>& hist, std::span<const double> g) {
    std::vector<double> q(g.begin(), g.end());
    std::vector<double> alpha(hist.size());
    for (std::size_t k = hist.size(); k-- > 0;) {
        alpha[k] = hist[k].rho * dot(hist[k].s, q);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * hist[k].y[i];
    }
    if (!hist.empty()) {
        const Pair& last = hist.back();
        const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
        for (auto& v : q) v *= gamma;
    }
    for (std::size_t k = 0; k < hist.size(); ++k) {
        const double beta = hist[k].rho * dot(hist[k].y, q);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * hist[k].s[i];
    }
    for (auto& v : q) v = -v;
    return q;
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> params,
                           const LbfgsOptions& options, const LbfgsObserver& observer) {
    options.validate();
    LbfgsResult result;
    std::vector<double> grad(params.size());
    double f = objective(params, grad);
    result.params = params;
    result.loss = f;
    if (!std::isfinite(f) || norm_inf(grad) != norm_inf(grad)) {
        result.termination = Termination::non_finite;
        return result;
    }
    if (norm_inf(grad) < options.grad_tol) {
        result.termination = Termination::gradient_tolerance;
        return result;
    }

    std::deque<Pair> hist;
    std::deque<double> recent{f};
    for (long k = 1; k <= options.max_iterations; ++k) {
        LineSearchOutcome ls;
        double dphi0 = 0.0;
        for (int attempt = 0; attempt < 2; ++attempt) {
            std::vector<double> d = direction(hist, grad);
            dphi0 = dot(grad, d);
            if (!(dphi0 < 0.0)) {
                hist.clear();
                d = direction(hist, grad);
                dphi0 = dot(grad, d);
            }
            const double gnorm2 = std::sqrt(dot(grad, grad));
            const double alpha0 = hist.empty() ? std::min(1.0, 1.0 / gnorm2) : 1.0;
            LineSearch search(objective, options, params, f, d, dphi0);
            ls = search.run(alpha0);
            if (ls.ok || hist.empty()) break;
            // Retry once along steepest descent with a fresh history.
            hist.clear();
        }
        if (!ls.ok) {
            result.termination = Termination::line_search_failure;
            return result;
        }

        Trial& t = ls.point;
        Pair p;
        p.s.resize(params.size());
        p.y.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            p.s[i] = t.x[i] - params[i];
            p.y[i] = t.g[i] - grad[i];
        }
        const double sy = dot(p.s, p.y);
        if (sy > 0.0) {
            p.rho = 1.0 / sy;
            hist.push_back(std::move(p));
            if (hist.size() > options.history) hist.pop_front();
        } else {
            ++result.skipped_pairs;
        }

        const double f_prev = f;
        params = std::move(t.x);
        grad = std::move(t.g);
        f = t.f;

        LbfgsIterate it;
        it.iteration = k;
        it.loss = f;
        it.grad_norm = norm_inf(grad);
        it.step = t.alpha;
        it.evaluations = ls.evaluations;
        it.armijo = f <= f_prev + options.c1 * t.alpha * dphi0;
        it.curvature = std::abs(t.dphi) <= options.c2 * std::abs(dphi0);
        result.trace.push_back(it);
        if (f <= result.loss) {
            result.loss = f;
            result.params = params;
        }
        if (observer) observer(result.trace.back(), params);

        if (it.grad_norm < options.grad_tol) {
            result.termination = Termination::gradient_tolerance;
            return result;
        }
        recent.push_back(f);
        if (recent.size() > options.window + 1) recent.pop_front();
        if (recent.size() == options.window + 1) {
            const double old = recent.front();
            const double scale = std::max(std::abs(old), std::numeric_limits<double>::min());
            if ((old - f) / scale < options.rel_decrease_tol) {
                result.termination = Termination::relative_decrease;
                return result;
            }
        }
    }
    result.termination = Termination::max_iterations;
    return result;
}

}  // namespace trpinn
