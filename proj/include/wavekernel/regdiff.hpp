#pragma once
/**
 * @file regdiff.hpp
 * @brief Regularized time differentiation of noisy samples.
 *
 * smooth() returns the minimizer of
 *
 *     sum_i (u_i - psi_i)^2 dt + alpha sum_i (D2 u)_i^2 dt,   D2 u = (u_{i-1} - 2u_i + u_{i+1}) / dt^2
 *
 * i.e. the solution of (I + alpha D2^T D2) u = psi. Lines lie in the null space of
 * the penalty and pass through unchanged. alpha can be picked by the discrepancy
 * principle: the residual sum (u - psi)^2 dt should match delta^2 * (N dt).
 */

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "error.hpp"

namespace wk {

struct NoisySignal {
    double dt = 0;
    std::vector<double> values;
    double noise = 0.0;  // delta, same units as values

    void validate() const {
        require(dt > 0 && std::isfinite(dt), "signal spacing must be positive, got ", dt);
        require(noise >= 0 && std::isfinite(noise), "noise level must be >= 0, got ", noise);
        for (std::size_t i = 0; i < values.size(); ++i)
            require(std::isfinite(values[i]), "non-finite signal sample at index ", i);
    }
    double length() const { return static_cast<double>(values.size()) * dt; }
};

namespace regdiff {

struct Fixed {
    double alpha;
};
struct Auto {};
/// Plain differencing without smoothing, for exact data.
struct None {};

}  // namespace regdiff

using AlphaChoice = std::variant<regdiff::Fixed, regdiff::Auto, regdiff::None>;

struct RegConfig {
    AlphaChoice alpha = regdiff::Auto{};
    int order = 2;
};

inline std::vector<double> smooth(const NoisySignal& sig, double alpha) {
    sig.validate();
    require(alpha > 0 && std::isfinite(alpha), "smoothing weight alpha must be positive, got ", alpha);
    const auto n = static_cast<Eigen::Index>(sig.values.size());
    require(n >= 7, "smoothing needs at least 7 samples, got ", n);

    // With D the plain second difference and w = alpha / dt^4, solve the dual system
    // (I/w + D D^T) z = D psi and set u = psi - D^T z. D D^T is positive definite,
    // so this stays well conditioned as alpha grows and u tends to the best-fit line.
    const double w = alpha / std::pow(sig.dt, 4);
    const Eigen::Index m = n - 2;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(m) * 5);
    const double band[3] = {6.0, -4.0, 1.0};
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index d = 0; d < 3; ++d) {
            if (i + d >= m) break;
            double v = band[d] + (d == 0 ? 1.0 / w : 0.0);
            trip.emplace_back(i, i + d, v);
            if (d) trip.emplace_back(i + d, i, v);
        }
    Eigen::SparseMatrix<double> A(m, m);
    A.setFromTriplets(trip.begin(), trip.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success) throw NumericError("smoothing system factorization failed");
    Eigen::Map<const Eigen::VectorXd> psi(sig.values.data(), n);
    Eigen::VectorXd dpsi = psi.segment(0, m) - 2.0 * psi.segment(1, m) + psi.segment(2, m);
    Eigen::VectorXd z = solver.solve(dpsi);
    Eigen::VectorXd u = psi;
    u.segment(0, m) -= z;
    u.segment(1, m) += 2.0 * z;
    u.segment(2, m) -= z;
    return {u.data(), u.data() + n};
}

/// sum (u - psi)^2 dt
inline double smoothing_residual(const NoisySignal& sig, std::span<const double> u) {
    double s = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double d = u[i] - sig.values[i];
        s += d * d;
    }
    return s * sig.dt;
}

/// alpha sum (D2 u)^2 dt without the alpha factor.
inline double smoothing_penalty(const NoisySignal& sig, std::span<const double> u) {
    double s = 0;
    const double inv = 1.0 / (sig.dt * sig.dt);
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
        double d = (u[i - 1] - 2 * u[i] + u[i + 1]) * inv;
        s += d * d;
    }
    return s * sig.dt;
}

struct AlphaChoiceResult {
    enum class Status {
        Ok,
        Saturated,  // even the straight-line fit is within the noise level
        NoBracket,  // the smallest tested alpha already exceeds the noise level
    };
    double alpha = 0;
    double residual = 0;
    double target = 0;
    Status status = Status::Ok;
};

/// Discrepancy principle by bisection on log(alpha).
inline AlphaChoiceResult choose_alpha_discrepancy(const NoisySignal& sig) {
    sig.validate();
    require(sig.noise > 0, "automatic alpha needs a positive noise level");
    const double target = sig.noise * sig.noise * sig.length();
    const double scale = std::pow(sig.dt, 4);
    auto residual_at = [&](double log_a) {
        double a = scale * std::pow(10.0, log_a);
        return smoothing_residual(sig, smooth(sig, a));
    };
    double lo = -8.0, hi = 16.0;
    double r_lo = residual_at(lo), r_hi = residual_at(hi);
    AlphaChoiceResult out;
    out.target = target;
    if (r_lo > target) {
        out.alpha = scale * std::pow(10.0, lo);
        out.residual = r_lo;
        out.status = AlphaChoiceResult::Status::NoBracket;
        return out;
    }
    if (r_hi < target) {
        out.alpha = scale * std::pow(10.0, hi);
        out.residual = r_hi;
        out.status = AlphaChoiceResult::Status::Saturated;
        return out;
    }
    double mid = 0.5 * (lo + hi), r_mid = 0.0;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        r_mid = residual_at(mid);
        if (std::abs(std::log(r_mid / target)) < 1e-3 || hi - lo < 1e-10) break;
        (r_mid < target ? lo : hi) = mid;
    }
    out.alpha = scale * std::pow(10.0, mid);
    out.residual = r_mid;
    return out;
}

struct DerivativeResult {
    std::vector<double> values;
    std::vector<bool> one_sided;  // true where an endpoint stencil was involved
    double alpha = 0;             // 0 when no smoothing was applied
    AlphaChoiceResult::Status status = AlphaChoiceResult::Status::Ok;
};

namespace detail {

inline void diff_pass(std::vector<double>& u, std::vector<bool>& flag, double dt, int order) {
    const std::size_t n = u.size();
    std::vector<double> out(n);
    std::vector<bool> f(n);
    if (order == 1) {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            out[i] = (u[i + 1] - u[i - 1]) / (2 * dt);
            f[i] = flag[i - 1] || flag[i + 1];
        }
        out[0] = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * dt);
        out[n - 1] = (3 * u[n - 1] - 4 * u[n - 2] + u[n - 3]) / (2 * dt);
    } else {
        const double inv = 1.0 / (dt * dt);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            out[i] = (u[i - 1] - 2 * u[i] + u[i + 1]) * inv;
            f[i] = flag[i - 1] || flag[i] || flag[i + 1];
        }
        out[0] = (2 * u[0] - 5 * u[1] + 4 * u[2] - u[3]) * inv;
        out[n - 1] = (2 * u[n - 1] - 5 * u[n - 2] + 4 * u[n - 3] - u[n - 4]) * inv;
    }
    f[0] = f[n - 1] = true;
    u.swap(out);
    flag.swap(f);
}

}  // namespace detail

/// k-th derivative: smoothing (per config) then centred second-order differences.
inline DerivativeResult derivative(const NoisySignal& sig, int k, const RegConfig& cfg = {}) {
    sig.validate();
    require(k >= 1 && k <= 4, "derivative order must be in 1..4, got ", k);
    require(sig.values.size() >= static_cast<std::size_t>(2 * k + 3), "order-", k, " derivative needs at least ",
            2 * k + 3, " samples, got ", sig.values.size());
    DerivativeResult out;
    std::vector<double> u;
    if (auto* f = std::get_if<regdiff::Fixed>(&cfg.alpha)) {
        out.alpha = f->alpha;
        u = smooth(sig, f->alpha);
    } else if (std::holds_alternative<regdiff::Auto>(cfg.alpha)) {
        AlphaChoiceResult c = choose_alpha_discrepancy(sig);
        out.alpha = c.alpha;
        out.status = c.status;
        u = smooth(sig, c.alpha);
    } else {
        u = sig.values;
    }
    std::vector<bool> flag(u.size(), false);
    if (k % 2 == 1) detail::diff_pass(u, flag, sig.dt, 1);
    for (int p = 0; p < k / 2; ++p) detail::diff_pass(u, flag, sig.dt, 2);
    out.values = std::move(u);
    out.one_sided = std::move(flag);
    return out;
}

}  // namespace wk
