#include "trpinn/coeffs.hpp"

#include <algorithm>
#include <cmath>

#include "trpinn/error.hpp"

namespace trpinn {

Eig2 eigenvalues(const Sym2& a) {
    const double mean = 0.5 * (a.a11 + a.a22);
    const double half = 0.5 * (a.a11 - a.a22);
    const double rad = std::hypot(half, a.a12);
    return {mean - rad, mean + rad};
}

void validate(const CoefficientField& a) {
    if (!a.eval) throw ConfigError("coefficient field has no evaluator");
    if (!(a.theta > 0.0) || !(a.lambda >= a.theta)) {
        throw ConfigError("coefficient bounds need 0 < theta <= Lambda");
    }
}

CoefficientField checkerboard(double scale, Sym2 even, Sym2 odd) {
    if (!(scale > 0.0)) throw ConfigError("checkerboard scale must be positive");
    const Eig2 e = eigenvalues(even);
    const Eig2 o = eigenvalues(odd);
    CoefficientField f;
    f.theta = std::min(e.min, o.min);
    f.lambda = std::max(e.max, o.max);
    f.eval = [=](Point x) {
        const auto i = static_cast<long long>(std::floor(x.x1 / scale));
        const auto j = static_cast<long long>(std::floor(x.x2 / scale));
        return ((i + j) % 2 == 0) ? even : odd;
    };
    return f;
}

Point project_to_disk(Point x) {
    const double r = std::hypot(x.x1, x.x2);
    if (r <= 1.0) return x;
    return {x.x1 / r, x.x2 / r};
}

MollifiedField::MollifiedField(CoefficientField a, double eps, int resolution)
    : a_(std::move(a)), eps_(eps), h_(eps / resolution), reach_(resolution + 1) {
    // Sample the lattice-periodic gradient ratio over one cell.
    constexpr int kSamples = 32;
    for (int sx = 0; sx < kSamples; ++sx) {
        for (int sy = 0; sy < kSamples; ++sy) {
            const double ox = h_ * sx / kSamples;
            const double oy = h_ * sy / kSamples;
            double num = 0.0;
            double den = 0.0;
            for (int i = -reach_; i <= reach_; ++i) {
                for (int j = -reach_; j <= reach_; ++j) {
                    const double dx = ox - i * h_;
                    const double dy = oy - j * h_;
                    const double s = (dx * dx + dy * dy) / (eps_ * eps_);
                    if (s >= 1.0) continue;
                    const double phi = kernel(dx, dy);
                    den += phi;
                    num += phi / ((1.0 - s) * (1.0 - s)) * 2.0 * std::sqrt(s) / eps_;
                }
            }
            c_phi_ = std::max(c_phi_, eps_ * num / den);
        }
    }
}

double MollifiedField::kernel(double dx, double dy) const {
    const double s = (dx * dx + dy * dy) / (eps_ * eps_);
    if (s >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - s));
}

Sym2 MollifiedField::operator()(Point x) const {
    const auto i0 = static_cast<long long>(std::floor((x.x1 - eps_) / h_));
    const auto i1 = static_cast<long long>(std::ceil((x.x1 + eps_) / h_));
    const auto j0 = static_cast<long long>(std::floor((x.x2 - eps_) / h_));
    const auto j1 = static_cast<long long>(std::ceil((x.x2 + eps_) / h_));
    Sym2 acc;
    double wsum = 0.0;
    for (long long i = i0; i <= i1; ++i) {
        for (long long j = j0; j <= j1; ++j) {
            const double zx = static_cast<double>(i) * h_;
            const double zy = static_cast<double>(j) * h_;
            const double w = kernel(x.x1 - zx, x.x2 - zy);
            if (w == 0.0) continue;
            const Sym2 v = a_.eval(project_to_disk({zx, zy}));
            acc.a11 += w * v.a11;
            acc.a12 += w * v.a12;
            acc.a22 += w * v.a22;
            wsum += w;
        }
    }
    return {acc.a11 / wsum, acc.a12 / wsum, acc.a22 / wsum};
}

MollifiedField mollify(const CoefficientField& a, double eps, int resolution) {
    validate(a);
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw ConfigError("mollifier radius must be positive");
    }
    if (resolution < 2) throw ConfigError("mollifier resolution must be >= 2");
    return MollifiedField(a, eps, resolution);
}

double max_deviation(const MollifiedField& a_eps, std::span<const Point> points) {
    double worst = 0.0;
    for (const Point& p : points) {
        const Sym2 a = a_eps.base().eval(p);
        const Sym2 b = a_eps(p);
        const double d11 = a.a11 - b.a11;
        const double d12 = a.a12 - b.a12;
        const double d22 = a.a22 - b.a22;
        worst = std::max(worst, std::sqrt(d11 * d11 + 2.0 * d12 * d12 + d22 * d22));
    }
    return worst;
}

double commutator_rhs_l2(const MollifiedField& a_eps, const std::function<Point(Point)>& grad_u,
                         std::size_t n) {
    if (n == 0) throw ConfigError("grid must be nonempty");
    const double h = 2.0 / static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = -1.0 + (static_cast<double>(i) + 0.5) * h;
        for (std::size_t j = 0; j < n; ++j) {
            const double y = -1.0 + (static_cast<double>(j) + 0.5) * h;
            if (x * x + y * y >= 1.0) continue;
            const Point p{x, y};
            const Sym2 a = a_eps.base().eval(p);
            const Sym2 b = a_eps(p);
            const Point g = grad_u(p);
            const double v1 = (a.a11 - b.a11) * g.x1 + (a.a12 - b.a12) * g.x2;
            const double v2 = (a.a12 - b.a12) * g.x1 + (a.a22 - b.a22) * g.x2;
            sum += (v1 * v1 + v2 * v2) * h * h;
        }
    }
    return std::sqrt(sum);
}

std::vector<Point> points_away_from_grid(std::size_t count, double scale, double clearance,
                                         std::uint64_t seed) {
    if (!(clearance < 0.5 * scale)) {
        throw ConfigError("clearance must be below half the grid scale");
    }
    Rng rng(seed, 0xc0ef);
    std::vector<Point> out;
    out.reserve(count);
    const auto gap = [&](double v) {
        const double f = v / scale - std::floor(v / scale);
        return scale * std::min(f, 1.0 - f);
    };
    while (out.size() < count) {
        const double x = 2.0 * rng.uniform() - 1.0;
        const double y = 2.0 * rng.uniform() - 1.0;
        if (x * x + y * y >= 1.0) continue;
        if (gap(x) < clearance || gap(y) < clearance) continue;
        out.push_back({x, y});
    }
    return out;
}

}  // namespace trpinn
