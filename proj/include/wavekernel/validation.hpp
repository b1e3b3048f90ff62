#pragma once
/**
 * @file validation.hpp
 * @brief Direct solver for the Cauchy problem, operator-identity check and
 *        field comparison metrics.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driver.hpp"
#include "error.hpp"
#include "fdtd.hpp"
#include "grid.hpp"
#include "kernel.hpp"
#include "medium.hpp"
#include "skf_io.hpp"
#include "solve_config.hpp"
#include "source.hpp"

namespace wk {

/// Leapfrog solution of c y_tt - Lap y = s with zero Cauchy data, recorded per cfg.
template <class Source>
FrameSet direct_solve_with(const Medium& medium, const Source& src, double T, const SolveConfig& cfg,
                           const Box& source_box) {
    const Grid3& g = medium.grid();
    const double dt = cfl_dt(g.h(), medium.c0(), cfg.cfl);
    const std::size_t nt = steps_for(T, dt) + static_cast<std::size_t>(std::max(0, cfg.extra_steps));
    detail::check_padding(medium, source_box, cfg, T);
    return run_recorded(medium, src, dt, nt, record_range(g, cfg), cfg.partitions, cfg.sponge);
}

inline NodeSource node_source(const Medium& medium, const AnalyticSource& f) {
    const Grid3& g = medium.grid();
    IndexBox box = g.nodes_in(f.support());
    return NodeSource{box, [f, g](Index3 p, double t) { return f.value(g.node(p), t); }};
}

inline FrameSet direct_solve(const Medium& medium, const AnalyticSource& f, double T, const SolveConfig& cfg = {}) {
    f.psi.validate();
    return direct_solve_with(medium, node_source(medium, f), T, cfg, f.support());
}

struct ComparisonRow {
    double h = 0;
    double rel_l2 = 0;
    double max_abs = 0;
};

struct ComparisonReport {
    double rel_l2 = 0;     // |a - b|_2 / max(|b|_2, floor)
    double rel_max = 0;    // |a - b|_inf / max(|b|_inf, floor)
    double max_abs = 0;    // |a - b|_inf
    double ref_l2 = 0;
    double ref_max = 0;
    std::size_t count = 0;
    std::vector<ComparisonRow> table;       // refinement study, coarse to fine
    std::vector<double> orders_l2, orders_max;  // only with >= 3 rows
    double seconds = 0;
};

inline constexpr double kNormFloor = 1e-300;

/// Discrepancy of `a` against the reference `b`.
inline ComparisonReport compare_values(std::span<const double> a, std::span<const double> b) {
    require<ValidationError>(a.size() == b.size(), "shape mismatch: ", a.size(), " vs ", b.size(), " values");
    ComparisonReport r;
    double d2 = 0, b2 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        d2 += d * d;
        b2 += b[i] * b[i];
        r.max_abs = std::max(r.max_abs, std::abs(d));
        r.ref_max = std::max(r.ref_max, std::abs(b[i]));
    }
    r.count = a.size();
    r.ref_l2 = std::sqrt(b2);
    r.rel_l2 = std::sqrt(d2) / std::max(r.ref_l2, kNormFloor);
    r.rel_max = r.max_abs / std::max(r.ref_max, kNormFloor);
    return r;
}

/**
 * Compares two frame sets on a common grid and time step over an optional node
 * range (of the frames' grid) and step window [n0, n1]. No interpolation.
 */
inline ComparisonReport compare_fields(const FrameSet& a, const FrameSet& b, std::optional<IndexBox> region = {},
                                       std::size_t n0 = 0, std::optional<std::size_t> n1 = {}) {
    require<ValidationError>(a.grid == b.grid, "compare_fields: grids differ (", a.grid.nx(), "x", a.grid.ny(), "x",
                             a.grid.nz(), " vs ", b.grid.nx(), "x", b.grid.ny(), "x", b.grid.nz(),
                             "); regrid explicitly first");
    require<ValidationError>(a.dt == b.dt, "compare_fields: time steps differ (", a.dt, " vs ", b.dt, ")");
    const std::size_t last = n1.value_or(std::min(a.steps(), b.steps()));
    require<ValidationError>(last <= a.steps() && last <= b.steps() && n0 <= last,
                             "compare_fields: time window outside the frame sets");
    const IndexBox r = region.value_or(a.grid.all());
    std::vector<double> va, vb;
    va.reserve(r.size() * (last - n0 + 1));
    vb.reserve(va.capacity());
    for (std::size_t n = n0; n <= last; ++n) {
        auto fa = a.frame(n), fb = b.frame(n);
        for (int k = r.lo.k; k <= r.hi.k; ++k)
            for (int j = r.lo.j; j <= r.hi.j; ++j)
                for (int i = r.lo.i; i <= r.hi.i; ++i) {
                    std::size_t idx = a.grid.linear(i, j, k);
                    va.push_back(fa[idx]);
                    vb.push_back(fb[idx]);
                }
    }
    return compare_values(va, vb);
}

/// log2 of successive error ratios for a halving sequence.
inline std::vector<double> observed_orders(std::span<const double> errors) {
    std::vector<double> p;
    if (errors.size() < 3) return p;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) p.push_back(std::log2(errors[i] / errors[i + 1]));
    return p;
}

inline void finalize_orders(ComparisonReport& r) {
    std::vector<double> l2, mx;
    for (const auto& row : r.table) {
        l2.push_back(row.rel_l2);
        mx.push_back(row.max_abs);
    }
    r.orders_l2 = observed_orders(l2);
    r.orders_max = observed_orders(mx);
}

/// Coefficient values over a node range of the medium grid.
inline Field sample_coefficient(const Medium& m, const IndexBox& r) {
    Field c(r.size());
    for (int k = r.lo.k; k <= r.hi.k; ++k)
        for (int j = r.lo.j; j <= r.hi.j; ++j)
            for (int i = r.lo.i; i <= r.hi.i; ++i) c[r.offset({i, j, k})] = m.at({i, j, k});
    return c;
}

/**
 * Applies c D_t^2 - Lap (stride `stride` in space and time) to the frames and
 * compares with f at the middle level, on nodes at least `stride` away from the
 * frames' boundary. Frames must lie on a node range of the medium grid. With
 * stride 1 the leapfrog update satisfies the identity to rounding; stride 2 is
 * the consistency check that converges at the scheme's order.
 */
inline ComparisonReport verify_identity_220(const FrameSet& y, const Medium& medium, const AnalyticSource& f,
                                            int stride = 2, std::size_t n_lo = 0,
                                            std::optional<std::size_t> n_hi = {}) {
    const Grid3& g = medium.grid();
    require<ValidationError>(y.grid.h() == g.h() && g.is_node(y.grid.origin()),
                             "frame alignment mismatch: frames are not on the medium grid");
    IndexBox rng{g.nearest(y.grid.origin()), {}};
    rng.hi = {rng.lo.i + y.grid.nx() - 1, rng.lo.j + y.grid.ny() - 1, rng.lo.k + y.grid.nz() - 1};
    require<ValidationError>(g.in_range(rng.hi), "frame alignment mismatch: frames exceed the medium grid");
    require<ValidationError>(y.steps() >= static_cast<std::size_t>(2 * stride),
                             "need at least ", 2 * stride + 1, " frames");
    const Field c = sample_coefficient(medium, rng);
    const std::size_t s = static_cast<std::size_t>(stride);
    const std::size_t first = std::max(n_lo, s);
    const std::size_t last = std::min(n_hi.value_or(y.steps() - s), y.steps() - s);
    std::vector<double> got, want;
    for (std::size_t n = first; n <= last; ++n) {
        Field r = apply_operator(y.frame(n - s), y.frame(n), y.frame(n + s), y.grid, c, y.dt, stride);
        const double t = static_cast<double>(n) * y.dt;
        for (int k = stride; k < y.grid.nz() - stride; ++k)
            for (int j = stride; j < y.grid.ny() - stride; ++j)
                for (int i = stride; i < y.grid.nx() - stride; ++i) {
                    got.push_back(r[y.grid.linear(i, j, k)]);
                    want.push_back(f.value(y.grid.node(i, j, k), t));
                }
    }
    return compare_values(got, want);
}

}  // namespace wk
