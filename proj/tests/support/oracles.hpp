#pragma once
// Independent reference solutions used by the tests. Nothing here goes through
// the kernel traces, the representation sums or the leapfrog engine.

#include <cmath>
#include <numbers>
#include <vector>

#include "wavekernel/grid.hpp"
#include "wavekernel/source.hpp"

namespace wk::oracle {

/**
 * Free-space retarded potential y(x,t) = int f(xi, t - |x-xi|) / (4 pi |x-xi|) dxi
 * for f = A (1 - |xi-c|^2/R^2)^q psi(t). Integrating over spheres around x
 * reduces it to
 *
 *   y = A / (2D) int psi(t - r) [P(|D - r|) - P(D + r)] dr,   P(s) = R^2/(2(q+1)) (1 - s^2/R^2)_+^{q+1}
 *
 * with D = |x - c|, evaluated here by composite Gauss-Legendre on [max(0, D-R), D+R].
 */
inline double retarded_potential(const AnalyticSource& f, Vec3 x, double t, int panels = 400) {
    const double R = f.phi.radius;
    const int q = f.phi.power;
    const double D = distance(x, f.phi.center);
    auto P = [&](double s) {
        double u = 1.0 - s * s / (R * R);
        return u <= 0 ? 0.0 : R * R / (2.0 * (q + 1)) * std::pow(u, q + 1);
    };
    const double a = std::max(0.0, D - R), b = D + R;
    // 5-point Gauss-Legendre
    static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                 0.9061798459386640};
    static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};
    double sum = 0;
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double mid = a + (p + 0.5) * w;
        for (int g = 0; g < 5; ++g) {
            double r = mid + 0.5 * w * gx[g];
            sum += 0.5 * w * gw[g] * f.psi(t - r) * (P(std::abs(D - r)) - P(D + r));
        }
    }
    return f.amplitude * sum / (2.0 * D);
}

/// Manufactured field t^p * spatial(x) with exact derivatives.
struct Manufactured {
    int p = 5;
    SpatialBump bump{};  // used when gaussian_width == 0
    double gaussian_width = 0.0;
    Vec3 center{};

    double space(Vec3 x) const {
        if (gaussian_width == 0.0) return bump(x);
        Vec3 d = x - center;
        return std::exp(-(d.x * d.x + d.y * d.y + d.z * d.z) / (gaussian_width * gaussian_width));
    }
    double space_laplacian(Vec3 x) const {
        if (gaussian_width == 0.0) return bump.laplacian(x);
        Vec3 d = x - center;
        double s2 = gaussian_width * gaussian_width;
        double r2 = d.x * d.x + d.y * d.y + d.z * d.z;
        return std::exp(-r2 / s2) * (4.0 * r2 / (s2 * s2) - 6.0 / s2);
    }
    double value(Vec3 x, double t) const { return std::pow(t, p) * space(x); }
    /// c y_tt - Lap y
    double rhs(double c, Vec3 x, double t) const {
        double ytt = p * (p - 1) * std::pow(t, p - 2) * space(x);
        return c * ytt - std::pow(t, p) * space_laplacian(x);
    }
};

}  // namespace wk::oracle
