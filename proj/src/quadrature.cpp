#include "trpinn/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "trpinn/error.hpp"

namespace trpinn {

void SeminormQuadSpec::validate() const {
    if (m < 16) {
        throw ConfigError("semi-norm quadrature needs m >= 16");
    }
    if (!(upper > lower) || !std::isfinite(upper) || !std::isfinite(lower)) {
        throw ConfigError("semi-norm quadrature needs a finite interval with upper > lower");
    }
    if (delta && !(*delta > 0.0 && *delta <= std::numbers::pi)) {
        throw ConfigError("delta must lie in (0, pi]");
    }
}

std::vector<double> midpoint_nodes(const SeminormQuadSpec& spec) {
    spec.validate();
    std::vector<double> t(spec.m);
    const double h = spec.cell();
    for (std::size_t i = 0; i < spec.m; ++i) {
        t[i] = spec.lower + (static_cast<double>(i) + 0.5) * h;
    }
    return t;
}

double seminorm_midpoint(std::span<const double> samples, const SeminormQuadSpec& spec) {
    spec.validate();
    const std::size_t m = spec.m;
    if (samples.size() != m) {
        throw DataError("expected " + std::to_string(m) + " samples, got " +
                        std::to_string(samples.size()));
    }
    for (const double v : samples) {
        if (!std::isfinite(v)) {
            throw DataError("non-finite sample in semi-norm quadrature");
        }
    }
    const double h = spec.cell();
    const double length = spec.upper - spec.lower;
    // Largest possible centre distance; a delta at or beyond it keeps every pair.
    const double reach = spec.periodic ? 0.5 * length : length;
    const bool localized = spec.delta && *spec.delta < reach;

    // The kernel depends on |i - j| only: weight[k] = 1 / dist(k)^2.
    double total = 0.0;
    for (std::size_t k = 1; k < m; ++k) {
        const double steps = spec.periodic ? static_cast<double>(std::min(k, m - k))
                                           : static_cast<double>(k);
        const double dist = steps * h;
        if (localized && !(dist < *spec.delta)) {
            continue;
        }
        double band = 0.0;
        for (std::size_t i = 0; i + k < m; ++i) {
            const double d = samples[i + k] - samples[i];
            band += d * d;
        }
        total += band / (dist * dist);
    }
    // Each unordered pair appears twice in the double integral.
    return 2.0 * total * h * h;
}

double seminorm_midpoint(const ScalarFn& g, const SeminormQuadSpec& spec) {
    const auto nodes = midpoint_nodes(spec);
    std::vector<double> samples(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        samples[i] = g(nodes[i]);
    }
    return seminorm_midpoint(samples, spec);
}

namespace {

SeminormEstimate refine(const ScalarFn& g, SeminormQuadSpec spec) {
    SeminormEstimate est;
    est.m = spec.m;
    est.value = seminorm_midpoint(g, spec);
    spec.m *= 2;
    est.refined = seminorm_midpoint(g, spec);
    est.richardson = 2.0 * est.refined - est.value;
    return est;
}

}  // namespace

SeminormEstimate seminorm_full(const ScalarFn& g, SeminormQuadSpec spec) {
    spec.delta.reset();
    return refine(g, spec);
}

SeminormEstimate seminorm_delta(const ScalarFn& g, const SeminormQuadSpec& spec) {
    if (!spec.delta) {
        throw ConfigError("seminorm_delta needs delta");
    }
    return refine(g, spec);
}

double sqrt_profile_seminorm_exact() {
    return 12.0 * std::numbers::pi * std::numbers::ln2 - 2.0 * std::numbers::pi * std::numbers::pi;
}

}  // namespace trpinn
