#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace trpinn {

/// Midpoint tensor rule for the Sobolev-Slobodeckij double integral
///   int int |g(s) - g(t)|^2 / |s - t|^2 ds dt
/// over [lower, upper]^2, with |s - t| the parameter distance (wrapped on
/// periodic domains). Diagonal cells are skipped, so the singular set is
/// never evaluated. With `delta` set, only cell pairs whose centres are
/// closer than delta contribute.
struct SeminormQuadSpec {
    std::size_t m = 1024;
    std::optional<double> delta;
    double lower = 0.0;
    double upper = 6.283185307179586476925286766559;
    bool periodic = true;

    /// m >= 16, upper > lower, delta in (0, pi] when present.
    void validate() const;
    double cell() const { return (upper - lower) / static_cast<double>(m); }
};

struct SeminormEstimate {
    std::size_t m = 0;
    double value = 0.0;       // grid m
    double refined = 0.0;     // grid 2m
    double richardson = 0.0;  // 2 * refined - value (first-order error model)
};

using ScalarFn = std::function<double(double)>;

/// Cell centres lower + (i + 1/2) h, i = 0..m-1.
std::vector<double> midpoint_nodes(const SeminormQuadSpec& spec);

/// Rule applied to samples taken at midpoint_nodes(spec). Throws DataError on
/// non-finite samples.
double seminorm_midpoint(std::span<const double> samples, const SeminormQuadSpec& spec);
double seminorm_midpoint(const ScalarFn& g, const SeminormQuadSpec& spec);

/// Full-domain value at m and 2m plus the Richardson estimate (delta ignored).
SeminormEstimate seminorm_full(const ScalarFn& g, SeminormQuadSpec spec);

/// Delta-localized value at m and 2m plus the Richardson estimate. Requires delta.
SeminormEstimate seminorm_delta(const ScalarFn& g, const SeminormQuadSpec& spec);

/// Closed form of the double integral of |sqrt|s| - sqrt|t||^2 / |s - t|^2
/// over [-pi, pi]^2: 12 pi log 2 - 2 pi^2.
double sqrt_profile_seminorm_exact();

}  // namespace trpinn
