#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "trpinn/geometry.hpp"

namespace trpinn {

/// Symmetric 2x2 matrix [[a11, a12], [a12, a22]].
struct Sym2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;
};

struct Eig2 {
    double min = 0.0;
    double max = 0.0;
};

Eig2 eigenvalues(const Sym2& a);

/// A matrix coefficient a(x) on the closed unit disk with ellipticity bounds
/// theta |xi|^2 <= xi' a(x) xi and |a(x) xi| <= Lambda |xi|.
struct CoefficientField {
    std::function<Sym2(Point)> eval;
    double theta = 0.0;
    double lambda = 0.0;
};

/// Throws ConfigError when the bounds are not 0 < theta <= Lambda.
void validate(const CoefficientField& a);

/// Piecewise constant checkerboard with squares of side `scale`: `even` where
/// floor(x1/scale) + floor(x2/scale) is even, `odd` elsewhere.
CoefficientField checkerboard(double scale, Sym2 even, Sym2 odd);

/// The field a_eps = a * phi_eps, realized as a normalized kernel sum over a
/// fixed lattice of spacing eps/resolution:
///   a_eps(x) = sum_k phi_eps(x - z_k) a(z_k) / sum_k phi_eps(x - z_k),
/// with a extended outside the disk by its value at the nearest disk point.
/// The normalization keeps constants exact and a_eps a convex combination of
/// values of a, so theta and Lambda carry over. a_eps is smooth in x.
class MollifiedField {
  public:
    MollifiedField(CoefficientField a, double eps, int resolution);

    Sym2 operator()(Point x) const;
    double epsilon() const { return eps_; }
    double spacing() const { return h_; }

    /// Sup over x of eps * sum|grad phi_eps| / sum phi_eps, sampled over one
    /// lattice cell (the ratio is lattice-periodic).
    double gradient_constant() const { return c_phi_; }

    /// Bound on any entry's difference quotient: osc * C_phi / eps, where osc
    /// is the largest spread of an entry of a over the disk (<= 2 Lambda).
    double lipschitz_bound(double oscillation) const { return oscillation * c_phi_ / eps_; }

    const CoefficientField& base() const { return a_; }

  private:
    double kernel(double dx, double dy) const;  // unnormalized bump, radius eps

    CoefficientField a_;
    double eps_;
    double h_;
    int reach_;  // lattice offsets checked in each direction
    double c_phi_ = 0.0;
};

/// Throws ConfigError for eps <= 0 or resolution < 2.
MollifiedField mollify(const CoefficientField& a, double eps, int resolution = 8);

/// Nearest point of the closed unit disk.
Point project_to_disk(Point x);

/// Maximum over points of the Frobenius distance between a and a_eps.
double max_deviation(const MollifiedField& a_eps, std::span<const Point> points);

/// ||(a - a_eps) grad u||_{L2(disk)} on a Cartesian midpoint grid of n x n
/// cells clipped to the disk.
double commutator_rhs_l2(const MollifiedField& a_eps, const std::function<Point(Point)>& grad_u,
                         std::size_t n);

/// Random points of the disk at distance >= `clearance` from every line
/// x1 = k * scale and x2 = k * scale, drawn by rejection.
std::vector<Point> points_away_from_grid(std::size_t count, double scale, double clearance,
                                         std::uint64_t seed);

}  // namespace trpinn
