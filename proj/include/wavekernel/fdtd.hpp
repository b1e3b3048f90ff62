#pragma once
/**
 * @file fdtd.hpp
 * @brief Explicit leapfrog integrator for c(x) v_tt - Lap v = s(x, t).
 *
 *   v^{n+1} = 2 v^n - v^{n-1} + (dt^2 / c) (Lap_h v^n + s^n)
 *
 * with the 7-point Laplacian and boundary nodes held at zero. Every node update
 * reads levels n and n-1 only, so the z-slab partitioning used for threading
 * never changes a single bit of the result.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "medium.hpp"

namespace wk {

/// dt = sigma h sqrt(c0) / sqrt(3); the fastest wave speed is 1/sqrt(c0).
inline double cfl_dt(double h, double c0, double sigma) {
    require(h > 0, "cfl_dt: h must be positive, got ", h);
    require(c0 > 0, "cfl_dt: c0 must be positive, got ", c0);
    require(sigma > 0 && sigma <= 1, "cfl_dt: safety factor must lie in (0, 1], got ", sigma);
    return sigma * h * std::sqrt(c0) / std::sqrt(3.0);
}

/// Runs body(k_begin, k_end) over `parts` contiguous z-ranges of [begin, end).
inline void for_slabs(int begin, int end, int parts, const std::function<void(int, int)>& body) {
    int n = end - begin;
    if (n <= 0) return;
    parts = std::clamp(parts, 1, n);
    if (parts == 1) {
        body(begin, end);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(parts - 1));
    auto lo = [&](int p) { return begin + static_cast<int>(static_cast<long>(n) * p / parts); };
    for (int p = 1; p < parts; ++p) pool.emplace_back([&, p] { body(lo(p), lo(p + 1)); });
    body(lo(0), lo(1));
}

/// Source with no support.
struct ZeroSource {
    std::optional<IndexBox> support() const { return std::nullopt; }
    double operator()(Index3, double) const { return 0.0; }
};

/// Source given by a callable on nodes inside a support range.
struct NodeSource {
    IndexBox box;
    std::function<double(Index3, double)> fn;
    std::optional<IndexBox> support() const { return box; }
    double operator()(Index3 p, double t) const { return fn(p, t); }
};

/// Quadratic sponge: damping rate gamma = strength * (depth / width)^2 inside
/// `width` nodes of every face. Approximate; exact runs use causal padding instead.
struct Sponge {
    int width = 0;
    double strength = 0.0;
};

/// Two time levels of the field.
struct WaveState {
    Grid3 grid;
    double dt = 0;
    Field prev, curr;
    std::size_t step = 0;  // index of `curr`

    WaveState() = default;
    WaveState(const Grid3& g, double dt_) : grid(g), dt(dt_), prev(g.size(), 0.0), curr(g.size(), 0.0) {}
    double time() const { return static_cast<double>(step) * dt; }
};

namespace detail {

inline double laplacian(const Field& v, const Grid3& g, int i, int j, int k, double inv_h2) {
    const std::size_t n = g.linear(i, j, k);
    const std::size_t sx = 1, sy = static_cast<std::size_t>(g.nx()),
                      sz = static_cast<std::size_t>(g.nx()) * static_cast<std::size_t>(g.ny());
    return (v[n - sx] + v[n + sx] + v[n - sy] + v[n + sy] + v[n - sz] + v[n + sz] - 6.0 * v[n]) *
           inv_h2;
}

}  // namespace detail

/// Reusable stepping engine for one medium and time step.
class Leapfrog {
public:
    Leapfrog(const Medium& medium, double dt, int partitions = 1, Sponge sponge = {})
        : medium_(&medium), dt_(dt), partitions_(std::max(1, partitions)) {
        const Grid3& g = medium.grid();
        double limit = cfl_dt(g.h(), medium.c0(), 1.0);
        require(dt > 0 && dt <= limit * (1 + 1e-12), "CFL violation: dt=", dt,
                " exceeds h sqrt(c0)/sqrt(3)=", limit);
        coef_.resize(g.size());
        for (std::size_t n = 0; n < g.size(); ++n) coef_[n] = dt * dt / medium[n];
        if (sponge.width > 0 && sponge.strength > 0) {
            eta_.assign(g.size(), 0.0);
            for (int k = 0; k < g.nz(); ++k)
                for (int j = 0; j < g.ny(); ++j)
                    for (int i = 0; i < g.nx(); ++i) {
                        int depth = std::min({i, j, k, g.nx() - 1 - i, g.ny() - 1 - j, g.nz() - 1 - k});
                        if (depth >= sponge.width) continue;
                        double s = static_cast<double>(sponge.width - depth) / sponge.width;
                        eta_[g.linear(i, j, k)] = 0.5 * dt * sponge.strength * s * s;
                    }
        }
    }

    const Medium& medium() const { return *medium_; }
    double dt() const { return dt_; }
    int partitions() const { return partitions_; }

    /// Writes level n+1 into `next` from `state` (levels n-1, n) and source s^n.
    template <class Source>
    void advance_into(const WaveState& state, const Source& src, Field& next) const {
        const Grid3& g = medium_->grid();
        require(state.grid == g, "wave state grid does not match the medium grid");
        next.assign(g.size(), 0.0);
        const double inv_h2 = 1.0 / (g.h() * g.h());
        const double t = state.time();
        const std::optional<IndexBox> support = src.support();
        std::vector<std::size_t> bad(static_cast<std::size_t>(partitions_),
                                     std::numeric_limits<std::size_t>::max());
        const int parts = std::clamp(partitions_, 1, std::max(1, g.nz() - 2));

        auto body = [&](int k0, int k1) {
            std::size_t first_bad = std::numeric_limits<std::size_t>::max();
            for (int k = k0; k < k1; ++k)
                for (int j = 1; j < g.ny() - 1; ++j)
                    for (int i = 1; i < g.nx() - 1; ++i) {
                        const std::size_t n = g.linear(i, j, k);
                        double acc = detail::laplacian(state.curr, g, i, j, k, inv_h2);
                        if (support && support->contains({i, j, k})) acc += src({i, j, k}, t);
                        double v;
                        if (eta_.empty()) {
                            v = 2.0 * state.curr[n] - state.prev[n] + coef_[n] * acc;
                        } else {
                            const double e = eta_[n];
                            v = (2.0 * state.curr[n] - (1.0 - e) * state.prev[n] + coef_[n] * acc) /
                                (1.0 + e);
                        }
                        next[n] = v;
                        if (!std::isfinite(v) && n < first_bad) first_bad = n;
                    }
            return first_bad;
        };

        const int span_k = g.nz() - 2;
        auto lo = [&](int p) { return 1 + static_cast<int>(static_cast<long>(span_k) * p / parts); };
        {
            std::vector<std::jthread> pool;
            for (int p = 1; p < parts; ++p)
                pool.emplace_back([&, p] { bad[static_cast<std::size_t>(p)] = body(lo(p), lo(p + 1)); });
            bad[0] = body(lo(0), lo(1));
        }
        std::size_t first = *std::min_element(bad.begin(), bad.end());
        if (first != std::numeric_limits<std::size_t>::max()) {
            Index3 p = g.unlinear(first);
            throw NumericError(detail::cat("instability: non-finite value at step ", state.step + 1,
                                           ", node (", p.i, ",", p.j, ",", p.k, ")"));
        }
    }

    /// Advances the state in place by one step.
    template <class Source>
    void advance(WaveState& state, const Source& src) {
        advance_into(state, src, scratch_);
        std::swap(state.prev, state.curr);
        std::swap(state.curr, scratch_);
        ++state.step;
    }

    /// Level 1 for zero Cauchy data: v^1 = dt^2/(2c) s^0.
    template <class Source>
    WaveState start(const Source& src) const {
        const Grid3& g = medium_->grid();
        WaveState s(g, dt_);
        if (auto box = src.support()) {
            for (int k = std::max(1, box->lo.k); k <= std::min(g.nz() - 2, box->hi.k); ++k)
                for (int j = std::max(1, box->lo.j); j <= std::min(g.ny() - 2, box->hi.j); ++j)
                    for (int i = std::max(1, box->lo.i); i <= std::min(g.nx() - 2, box->hi.i); ++i) {
                        std::size_t n = g.linear(i, j, k);
                        s.curr[n] = 0.5 * coef_[n] * src({i, j, k}, 0.0);
                    }
        }
        s.step = 1;
        return s;
    }

private:
    const Medium* medium_;
    double dt_;
    int partitions_;
    Field coef_;
    Field eta_;
    Field scratch_;
};

/// One leapfrog step as a value transformation.
template <class Source>
WaveState step(const WaveState& state, const Medium& medium, const Source& src, int partitions = 1) {
    Leapfrog lf(medium, state.dt, partitions);
    WaveState out = state;
    lf.advance(out, src);
    return out;
}

/**
 * Discrete residual c D_t^2 v - Lap v at the middle level, evaluated with the
 * centered stencils at `stride` nodes / steps. The levels must be `stride` steps
 * apart. Nodes closer than `stride` to the boundary get 0.
 */
inline Field apply_operator(std::span<const double> prev, std::span<const double> curr,
                            std::span<const double> next, const Grid3& g, std::span<const double> c,
                            double dt, int stride = 1) {
    require(prev.size() == g.size() && curr.size() == g.size() && next.size() == g.size() &&
                c.size() == g.size(),
            "apply_operator: level sizes do not match the grid (", g.size(), " nodes)");
    require(dt > 0, "apply_operator: dt must be positive");
    require(stride >= 1, "apply_operator: stride must be >= 1");
    const int s = stride;
    const double sh = s * g.h(), sdt = s * dt;
    const double inv_h2 = 1.0 / (sh * sh), inv_dt2 = 1.0 / (sdt * sdt);
    const std::size_t sx = static_cast<std::size_t>(s), sy = sx * static_cast<std::size_t>(g.nx()),
                      sz = sy * static_cast<std::size_t>(g.ny());
    Field r(g.size(), 0.0);
    for (int k = s; k < g.nz() - s; ++k)
        for (int j = s; j < g.ny() - s; ++j)
            for (int i = s; i < g.nx() - s; ++i) {
                const std::size_t n = g.linear(i, j, k);
                double lap = (curr[n - sx] + curr[n + sx] + curr[n - sy] + curr[n + sy] +
                              curr[n - sz] + curr[n + sz] - 6.0 * curr[n]) *
                             inv_h2;
                r[n] = c[n] * (next[n] - 2.0 * curr[n] + prev[n]) * inv_dt2 - lap;
            }
    return r;
}

inline Field apply_operator(std::span<const double> prev, std::span<const double> curr,
                            std::span<const double> next, const Medium& medium, double dt,
                            int stride = 1) {
    return apply_operator(prev, curr, next, medium.grid(), medium.values(), dt, stride);
}

/// Extra nodes per face, order -x,+x,-y,+y,-z,+z.
using Padding = std::array<int, 6>;

/**
 * Minimal whole-node padding so that a signal leaving `sources`, reflecting off the
 * outer boundary and returning to `region` needs longer than T:
 * (d_src + p) + (d_region + p) > T / sqrt(c0) on every face.
 */
inline Padding required_padding(const Box& sources, const Box& region, const Grid3& grid, double T,
                                double c0) {
    require(c0 > 0, "required_padding: c0 must be positive");
    require(!region.empty, "required_padding: region of interest is empty");
    Padding pad{};
    if (T <= 0) return pad;
    const Box b = grid.bounds();
    const Box src = sources.empty ? region : sources;
    const double reach = T / std::sqrt(c0);
    for (int a = 0; a < 3; ++a) {
        double d_lo = (src.lo[a] - b.lo[a]) + (region.lo[a] - b.lo[a]);
        double d_hi = (b.hi[a] - src.hi[a]) + (b.hi[a] - region.hi[a]);
        for (int side = 0; side < 2; ++side) {
            double d = side == 0 ? d_lo : d_hi;
            double need = reach - d;  // 2 p h > need
            int p = need < 0 ? 0 : static_cast<int>(std::floor(need / (2.0 * grid.h()))) + 1;
            pad[static_cast<std::size_t>(2 * a + side)] = p;
        }
    }
    return pad;
}

}  // namespace wk
