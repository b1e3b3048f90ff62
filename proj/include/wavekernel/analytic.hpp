#pragma once
/**
 * @file analytic.hpp
 * @brief Closed-form pieces of the kernel construction.
 *
 * ramp(k) is the k-th time antiderivative of the free-space retarded kernel
 * delta(t - tau - r) / (4 pi r):
 *
 *     ramp_k(x, t) = (t - tau - r)_+^(k-1) / ((k-1)! 4 pi r),   k = 1..4
 *
 * ramp_4 is the tail added to the regularized kernel; the regularized kernel's
 * right-hand side is g = -(c(x) - 1) ramp_2.
 */

#include <cmath>
#include <numbers>

#include "error.hpp"
#include "grid.hpp"
#include "medium.hpp"

namespace wk {

/// Handling of the 1/r factor near the source point.
struct Singularity {
    double min_radius = 0.0;  // r below this is singular
    bool cap = false;         // replace r by min_radius instead of failing
};

namespace detail {

inline double regularized_radius(Vec3 xi, Vec3 x, const Singularity& s) {
    double r = distance(x, xi);
    if (r == 0.0 || r < s.min_radius) {
        if (!s.cap || s.min_radius <= 0.0)
            throw NumericError(cat("kernel singularity: |x - xi| = ", r, " below regularization radius ",
                                   s.min_radius, " at x=(", x.x, ",", x.y, ",", x.z, ")"));
        r = s.min_radius;
    }
    return r;
}

}  // namespace detail

inline double eval_ramp(int k, Vec3 xi, double tau, Vec3 x, double t, const Singularity& s = {}) {
    require(k >= 0 && k <= 4, "ramp order must be in 0..4, got ", k);
    if (k == 0)
        throw ConfigError("ramp order 0 is the distribution delta(t - r)/(4 pi r); no pointwise value");
    // Outside the cone the value is exactly zero, also at r = 0.
    double rr = distance(x, xi);
    if (t - tau - rr <= 0.0) return 0.0;
    double r = detail::regularized_radius(xi, x, s);
    double z = t - tau - r;
    if (z <= 0.0) return 0.0;
    constexpr double four_pi = 4.0 * std::numbers::pi;
    switch (k) {
        case 1: return 1.0 / (four_pi * r);
        case 2: return z / (four_pi * r);
        case 3: return z * z / (2.0 * four_pi * r);
        default: return z * z * z / (6.0 * four_pi * r);
    }
}

/// (t - tau - r)^3 H(t - tau - r) / (24 pi r).
inline double eval_tail(Vec3 xi, double tau, Vec3 x, double t, const Singularity& s = {}) {
    return eval_ramp(4, xi, tau, x, t, s);
}

/// Pointwise g for a given coefficient value c(x).
inline double source_g_value(double cx, Vec3 xi, double tau, Vec3 x, double t,
                             const Singularity& s = {}) {
    if (cx == 1.0) return 0.0;
    return -(cx - 1.0) * eval_ramp(2, xi, tau, x, t, s);
}

/// Right-hand side of the regularized kernel problem for one source point.
struct SourceG {
    const Medium* medium = nullptr;
    Vec3 xi{};
    double tau = 0.0;
    Singularity singularity{};
};

inline double eval_source_g(const SourceG& g, Index3 node, double t) {
    const Grid3& grid = g.medium->grid();
    return source_g_value(g.medium->at(node), g.xi, g.tau, grid.node(node), t, g.singularity);
}

}  // namespace wk
