#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace testing {

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

/// Central differences of f at x, one coordinate at a time.
inline std::vector<double> central_gradient(const std::function<double(std::span<const double>)>& f,
                                            std::vector<double> x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + h;
        const double fp = f(x);
        x[i] = x0 - h;
        const double fm = f(x);
        x[i] = x0;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// Largest relative error over components whose reference exceeds `floor`,
/// with absolute comparison below it.
inline double worst_gradient_error(std::span<const double> got, std::span<const double> want,
                                   double floor) {
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const double e = std::abs(want[i]) > floor ? rel_err(got[i], want[i])
                                                   : std::abs(got[i] - want[i]);
        worst = std::max(worst, e);
    }
    return worst;
}

}  // namespace testing
