#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace trpinn {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Point {
    double x1 = 0.0;
    double x2 = 0.0;
};

/// Seeded 64-bit generator. `stream` separates independent consumers that
/// share one user-facing seed (model init, interior, boundary...).
class Rng {
  public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

  private:
    std::mt19937_64 engine_;
};

struct InteriorSet {
    std::vector<Point> points;
    std::uint64_t seed = 0;
};

enum class BoundaryMethod { linspace, randomized, uniform };

std::string_view to_string(BoundaryMethod m);
/// Throws ConfigError on unknown names.
BoundaryMethod parse_boundary_method(std::string_view name);

/// Counterclockwise boundary samples of the unit circle. Angles strictly
/// increase in [0, 2pi); indices wrap (sample N+1 is sample 1).
struct BoundarySet {
    std::vector<double> angles;
    std::vector<Point> points;
    BoundaryMethod method = BoundaryMethod::linspace;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return angles.size(); }
};

/// n i.i.d. uniform points on the open unit disk (r = sqrt(U1), theta = 2 pi U2).
InteriorSet sample_interior(std::size_t n, std::uint64_t seed);

/// linspace: theta_i = 2 pi i / n. randomized: one uniform draw per cell
/// [2 pi i / n, 2 pi (i+1) / n). uniform: n sorted i.i.d. angles, ties nudged
/// up by one ulp. Requires n >= 3.
BoundarySet sample_boundary(BoundaryMethod method, std::size_t n, std::uint64_t seed);

/// Boundary set from explicit angles (must be strictly increasing in [0, 2pi)).
BoundarySet boundary_from_angles(std::vector<double> angles);

}  // namespace trpinn
