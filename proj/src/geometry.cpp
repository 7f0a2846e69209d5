#include "trpinn/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "trpinn/error.hpp"

namespace trpinn {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::string_view to_string(BoundaryMethod m) {
    switch (m) {
        case BoundaryMethod::linspace:
            return "linspace";
        case BoundaryMethod::randomized:
            return "randomized";
        case BoundaryMethod::uniform:
            return "uniform";
    }
    return "?";
}

BoundaryMethod parse_boundary_method(std::string_view name) {
    if (name == "linspace") return BoundaryMethod::linspace;
    if (name == "randomized") return BoundaryMethod::randomized;
    if (name == "uniform") return BoundaryMethod::uniform;
    throw ConfigError("unknown boundary sampling method '" + std::string(name) +
                      "' (expected linspace, randomized or uniform)");
}

namespace {
constexpr std::uint64_t kInteriorStream = 0x1a7e;
constexpr std::uint64_t kBoundaryStream = 0xb0d7;
}  // namespace

InteriorSet sample_interior(std::size_t n, std::uint64_t seed) {
    if (n == 0) {
        throw ConfigError("interior sample count must be >= 1");
    }
    Rng rng(seed, kInteriorStream);
    InteriorSet set;
    set.seed = seed;
    set.points.reserve(n);
    while (set.points.size() < n) {
        const double r = std::sqrt(rng.uniform());
        const double t = kTwoPi * rng.uniform();
        const Point p{r * std::cos(t), r * std::sin(t)};
        // r < 1 always, but cos/sin rounding can land exactly on the circle.
        if (p.x1 * p.x1 + p.x2 * p.x2 < 1.0) {
            set.points.push_back(p);
        }
    }
    return set;
}

BoundarySet boundary_from_angles(std::vector<double> angles) {
    for (std::size_t i = 0; i < angles.size(); ++i) {
        if (!(angles[i] >= 0.0 && angles[i] < kTwoPi)) {
            throw DataError("boundary angle outside [0, 2pi)");
        }
        if (i > 0 && !(angles[i] > angles[i - 1])) {
            throw DataError("boundary angles must be strictly increasing");
        }
    }
    BoundarySet set;
    set.points.reserve(angles.size());
    for (const double t : angles) {
        set.points.push_back({std::cos(t), std::sin(t)});
    }
    set.angles = std::move(angles);
    return set;
}

BoundarySet sample_boundary(BoundaryMethod method, std::size_t n, std::uint64_t seed) {
    if (n < 3) {
        throw ConfigError("boundary sample count must be >= 3");
    }
    Rng rng(seed, kBoundaryStream);
    std::vector<double> angles(n);
    const double cell = kTwoPi / static_cast<double>(n);
    switch (method) {
        case BoundaryMethod::linspace:
            for (std::size_t i = 0; i < n; ++i) {
                angles[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
            }
            break;
        case BoundaryMethod::randomized:
            for (std::size_t i = 0; i < n; ++i) {
                const double lo = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
                const double hi = kTwoPi * static_cast<double>(i + 1) / static_cast<double>(n);
                double t = lo + cell * rng.uniform();
                if (t >= hi) {
                    t = std::nextafter(hi, lo);
                }
                angles[i] = t;
            }
            break;
        case BoundaryMethod::uniform:
            for (auto& t : angles) {
                t = kTwoPi * rng.uniform();
            }
            std::sort(angles.begin(), angles.end());
            for (std::size_t i = 1; i < n; ++i) {
                if (angles[i] <= angles[i - 1]) {
                    angles[i] = std::nextafter(angles[i - 1], kTwoPi);
                }
            }
            if (angles.back() >= kTwoPi) {
                throw DataError("uniform boundary sampling overflowed the period");
            }
            break;
    }
    BoundarySet set = boundary_from_angles(std::move(angles));
    set.method = method;
    set.seed = seed;
    return set;
}

}  // namespace trpinn
