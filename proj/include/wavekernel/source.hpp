#pragma once
/**
 * @file source.hpp
 * @brief Right-hand sides f(x, t) of the Cauchy problem.
 *
 * Analytic sources are separable, f = amplitude * phi(x) * psi(t), with
 * phi = (1 - s^2)^q a C^{q-1} compact bump and psi vanishing with its first four
 * derivatives at t = 0, so every time derivative up to order 4 is exact.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "grid.hpp"

namespace wk {

/// Radial bump (1 - s^2)^q, s = |x - center| / radius.
struct SpatialBump {
    Vec3 center{};
    double radius = 0.25;
    int power = 5;

    double operator()(Vec3 x) const {
        double u = dist2(x) / (radius * radius);
        return u >= 1.0 ? 0.0 : std::pow(1.0 - u, power);
    }

    /// Exact Laplacian: [4q(q-1) u (1-u)^{q-2} - 6q (1-u)^{q-1}] / R^2.
    double laplacian(Vec3 x) const {
        double u = dist2(x) / (radius * radius);
        if (u >= 1.0) return 0.0;
        const double q = power;
        double a = 1.0 - u;
        return (4 * q * (q - 1) * u * std::pow(a, q - 2) - 6 * q * std::pow(a, q - 1)) /
               (radius * radius);
    }

    Box support() const { return Box::around(center, radius); }

private:
    double dist2(Vec3 x) const {
        Vec3 d = x - center;
        return d.x * d.x + d.y * d.y + d.z * d.z;
    }
};

/// Time profile psi with exact derivatives.
struct TimeProfile {
    enum class Kind {
        Window,  // (s (1 - s))^p for s = t/duration in [0, 1], else 0
        Exp,     // t^p exp(-beta t)
    };
    Kind kind = Kind::Window;
    int power = 6;
    double duration = 1.0;
    double beta = 8.0;

    static TimeProfile window(double duration, int power) { return {Kind::Window, power, duration, 0.0}; }
    static TimeProfile exp(double beta, int power) { return {Kind::Exp, power, 0.0, beta}; }

    void validate() const {
        require(power >= 5, "time profile power must be >= 5 so psi and its first four derivatives vanish at t=0, got ",
                power);
        if (kind == Kind::Window) require(duration > 0, "window duration must be positive");
        if (kind == Kind::Exp) require(beta > 0, "exp profile beta must be positive");
    }

    /// d^k psi / dt^k at t, k = 0..power.
    double derivative(int k, double t) const {
        if (t <= 0.0) return 0.0;
        if (kind == Kind::Window) {
            if (t >= duration) return 0.0;
            const double s = t / duration;
            // (s(1-s))^p = sum_j C(p,j) (-1)^j s^{p+j}
            double acc = 0.0, binom = 1.0;
            for (int j = 0; j <= power; ++j) {
                int e = power + j;
                if (e >= k) {
                    double fall = 1.0;
                    for (int q = 0; q < k; ++q) fall *= e - q;
                    acc += (j % 2 ? -1.0 : 1.0) * binom * fall * std::pow(s, e - k);
                }
                binom = binom * (power - j) / (j + 1);
            }
            return acc / std::pow(duration, k);
        }
        // sum_j C(k,j) [p!/(p-j)!] t^{p-j} (-beta)^{k-j} e^{-beta t}
        double acc = 0.0, binom = 1.0, fall = 1.0;
        for (int j = 0; j <= k; ++j) {
            if (j <= power) acc += binom * fall * std::pow(t, power - j) * std::pow(-beta, k - j);
            binom = binom * (k - j) / (j + 1);
            fall *= power - j;
        }
        return acc * std::exp(-beta * t);
    }

    double operator()(double t) const { return derivative(0, t); }
};

/// f = amplitude * phi(x) * psi(t).
struct AnalyticSource {
    SpatialBump phi{};
    TimeProfile psi{};
    double amplitude = 1.0;

    double value(Vec3 x, double t) const { return amplitude * phi(x) * psi(t); }
    double dt_k(int k, Vec3 x, double t) const { return amplitude * phi(x) * psi.derivative(k, t); }
    Box support() const { return phi.support(); }
    bool is_zero() const { return amplitude == 0.0; }
};

/**
 * Noisy samples of f at the quadrature points: series[j][m] = f(xi_j, m * dt) + noise,
 * with declared noise level `noise`. Derivatives come from regularized differentiation.
 */
struct SampledSource {
    double dt = 0;
    std::vector<std::vector<double>> series;
    double noise = 0.0;
};

using SourceSpec = std::variant<AnalyticSource, SampledSource>;

}  // namespace wk
