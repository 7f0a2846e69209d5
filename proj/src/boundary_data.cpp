#include "trpinn/boundary_data.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>

#include "trpinn/error.hpp"
#include "trpinn/io.hpp"

namespace trpinn {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

BoundaryFunction BoundaryFunction::sin(int v) {
    if (v < 1) throw ConfigError("frequency V must be a positive integer");
    return BoundaryFunction{BoundaryKind::sin_v, v, {}};
}

BoundaryFunction BoundaryFunction::sharp(int v) {
    if (v < 1) throw ConfigError("frequency V must be a positive integer");
    return BoundaryFunction{BoundaryKind::sharp_v, v, {}};
}

BoundaryFunction BoundaryFunction::from_samples(std::vector<double> values) {
    if (values.empty()) throw ConfigError("sampled boundary data needs at least one value");
    for (const double v : values) {
        if (!std::isfinite(v)) throw DataError("non-finite boundary sample");
    }
    return BoundaryFunction{BoundaryKind::samples, 1, std::move(values)};
}

double wrap_angle(double t) {
    double r = std::fmod(t, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

double sharp_profile(double t) {
    if (t < kPi) {
        return 0.5 - std::sqrt(std::abs((t - kPi / 2.0) / kTwoPi));
    }
    return std::sqrt(std::abs((t - 3.0 * kPi / 2.0) / kTwoPi)) - 0.5;
}

double eval_g(const BoundaryFunction& g, double t) {
    switch (g.kind) {
        case BoundaryKind::sin_v:
            return std::sin(static_cast<double>(g.V) * t);
        case BoundaryKind::sharp_v:
            return sharp_profile(wrap_angle(static_cast<double>(g.V) * wrap_angle(t))) /
                   static_cast<double>(g.V);
        case BoundaryKind::samples: {
            const auto n = g.samples.size();
            const double s = wrap_angle(t) / kTwoPi * static_cast<double>(n);
            auto j = static_cast<std::size_t>(s);
            if (j >= n) j = n - 1;
            const double f = s - static_cast<double>(j);
            return (1.0 - f) * g.samples[j] + f * g.samples[(j + 1) % n];
        }
    }
    return 0.0;
}

std::complex<double> FourierSeries::coefficient(int n) const {
    if (n > modes() || -n > modes()) return {0.0, 0.0};
    return n >= 0 ? coeffs[static_cast<std::size_t>(n)]
                  : std::conj(coeffs[static_cast<std::size_t>(-n)]);
}

namespace {

// Horner evaluation of p(z) = sum_{n>=1} c_n z^n and p'(z).
void horner(const std::vector<std::complex<double>>& c, std::complex<double> z,
            std::complex<double>& p, std::complex<double>& dp) {
    p = {0.0, 0.0};
    dp = {0.0, 0.0};
    for (std::size_t n = c.size(); n-- > 1;) {
        dp = dp * z + p;
        p = p * z + c[n];
    }
    // One more shift: the loop built sum c_n z^{n-1}; multiply through by z.
    dp = dp * z + p;
    p = p * z;
}

}  // namespace

double FourierSeries::boundary_value(double t) const {
    std::complex<double> p, dp;
    horner(coeffs, std::polar(1.0, t), p, dp);
    return coeffs[0].real() + 2.0 * p.real();
}

FourierSeries fit_fourier(const BoundaryFunction& g, int n_samples, int n_modes,
                          int check_points) {
    if (n_modes < 0) throw ConfigError("n_modes must be >= 0");
    if (n_samples < 2 * n_modes + 1) {
        throw ConfigError("fit_fourier needs n_samples >= 2 n_modes + 1 (got n_samples=" +
                          std::to_string(n_samples) + ", n_modes=" + std::to_string(n_modes) +
                          ")");
    }
    if (check_points < 1) throw ConfigError("check_points must be >= 1");

    const auto n = static_cast<std::size_t>(n_samples);
    auto* in = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    std::unique_ptr<void, void (*)(void*)> in_guard(in, fftw_free);
    std::unique_ptr<void, void (*)(void*)> out_guard(out, fftw_free);
    fftw_plan plan = fftw_plan_dft_r2c_1d(n_samples, in, out, FFTW_ESTIMATE);
    for (std::size_t j = 0; j < n; ++j) {
        in[j] = eval_g(g, kTwoPi * static_cast<double>(j) / static_cast<double>(n));
        if (!std::isfinite(in[j])) {
            fftw_destroy_plan(plan);
            throw DataError("boundary data is not finite at a fit node");
        }
    }
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    FourierSeries fs;
    fs.coeffs.resize(static_cast<std::size_t>(n_modes) + 1);
    const double inv = 1.0 / static_cast<double>(n);
    for (int k = 0; k <= n_modes; ++k) {
        fs.coeffs[static_cast<std::size_t>(k)] = {out[k][0] * inv, out[k][1] * inv};
    }
    // The mean of real data is real.
    fs.coeffs[0] = {fs.coeffs[0].real(), 0.0};

    double err = 0.0;
    for (int k = 0; k <= check_points; ++k) {
        const double t = kTwoPi * static_cast<double>(k) / static_cast<double>(check_points);
        err = std::max(err, std::abs(fs.boundary_value(t) - eval_g(g, t)));
    }
    fs.reconstruction_error = err;
    return fs;
}

OracleValue oracle_eval(const FourierSeries& series, Point x) {
    const double r2 = x.x1 * x.x1 + x.x2 * x.x2;
    if (std::sqrt(r2) > 1.0 + 1e-12) {
        throw DomainError("oracle evaluated outside the closed unit disk");
    }
    std::complex<double> p, dp;
    horner(series.coeffs, {x.x1, x.x2}, p, dp);
    return {series.coeffs[0].real() + 2.0 * p.real(), 2.0 * dp.real(), -2.0 * dp.imag()};
}

void write_series_csv(const std::filesystem::path& path, const FourierSeries& series) {
    CsvWriter csv(path, "trpinn.fourier", 1, {"n", "re", "im"});
    for (int n = -series.modes(); n <= series.modes(); ++n) {
        const auto c = series.coefficient(n);
        csv.cell(n).cell(c.real()).cell(c.imag()).end_row();
    }
}

}  // namespace trpinn
