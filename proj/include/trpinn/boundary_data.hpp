#pragma once

#include <complex>
#include <filesystem>
#include <string_view>
#include <vector>

#include "trpinn/geometry.hpp"

namespace trpinn {

enum class BoundaryKind { sin_v, sharp_v, samples };

/// Dirichlet data on the unit circle as a function of the angle.
///
/// sin_v:   g(t) = sin(V t)
/// sharp_v: g(t) = g1(V t) / V with the square-root peak profile
///          g1(t) = 1/2 - sqrt(|(t - pi/2) / 2pi|)   for 0 <= t < pi
///          g1(t) = sqrt(|(t - 3pi/2) / 2pi|) - 1/2   for pi <= t <= 2pi
/// samples: periodic piecewise-linear interpolation of values on the
///          uniform grid t_j = 2 pi j / n.
struct BoundaryFunction {
    BoundaryKind kind = BoundaryKind::sin_v;
    int V = 1;
    std::vector<double> samples;

    static BoundaryFunction sin(int v);
    static BoundaryFunction sharp(int v);
    static BoundaryFunction from_samples(std::vector<double> values);
};

/// Reduce an angle into [0, 2pi).
double wrap_angle(double t);

/// The peak profile g1 on [0, 2pi] (no reduction applied).
double sharp_profile(double t);

double eval_g(const BoundaryFunction& g, double t);

/// Truncated Fourier series of real boundary data, c_n for 0 <= n <= modes
/// (c_{-n} = conj(c_n)). Its harmonic extension is
/// u(z) = c_0 + 2 Re sum_{n>=1} c_n z^n with z = x1 + i x2.
struct FourierSeries {
    std::vector<std::complex<double>> coeffs;
    /// max |series(t) - g(t)| on the check grid used by fit_fourier.
    double reconstruction_error = 0.0;

    int modes() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
    /// c_n for any integer n; zero outside |n| <= modes.
    std::complex<double> coefficient(int n) const;
    /// Series restricted to the circle at angle t.
    double boundary_value(double t) const;
};

struct OracleValue {
    double u = 0.0;
    double ux = 0.0;
    double uy = 0.0;
};

/// c_n = (1/N) sum_j g(t_j) e^{-i n t_j} on t_j = 2 pi j / N, computed with a
/// real-to-complex FFT. Requires n_samples >= 2 n_modes + 1. The
/// reconstruction error is measured on `check_points` + 1 equispaced angles
/// t_k = 2 pi k / check_points, k = 0..check_points.
FourierSeries fit_fourier(const BoundaryFunction& g, int n_samples, int n_modes,
                          int check_points = 10000);

/// Harmonic extension and its gradient at |x| <= 1. Throws DomainError for
/// |x| > 1 + 1e-12.
OracleValue oracle_eval(const FourierSeries& series, Point x);

/// CSV (n, re, im) for n = -modes..modes, preceded by the schema line.
void write_series_csv(const std::filesystem::path& path, const FourierSeries& series);

}  // namespace trpinn
