#pragma once
/**
 * @file medium.hpp
 * @brief Wave-speed coefficient c(x) on a node grid.
 *
 * The coefficient multiplies the time derivative, c(x) u_tt - Lap u = f, so the
 * local wave speed is 1/sqrt(c). A valid medium is bounded away from zero and
 * equals 1 exactly outside a compact box (omega_box) that keeps at least two
 * nodes of margin from the grid boundary.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "hash.hpp"

namespace wk {

/// Compactly supported C^1 bump: c += amplitude * (1 - s^2)^2, s = |x - center| / radius.
struct Bump {
    Vec3 center{};
    double radius = 0.5;
    double amplitude = 0.0;

    double shape(Vec3 x) const {
        double s = distance(x, center) / radius;
        if (s >= 1.0) return 0.0;
        double q = 1.0 - s * s;
        return q * q;
    }
};

struct MediumProfile {
    enum class Kind { Constant, RadialBump, SumOfBumps, FromFile };

    Kind kind = Kind::Constant;
    std::vector<Bump> bumps;
    std::string path;

    static MediumProfile constant() { return {}; }
    static MediumProfile bump(Vec3 center, double radius, double amplitude) {
        return {Kind::RadialBump, {Bump{center, radius, amplitude}}, {}};
    }
    static MediumProfile sum_of_bumps(std::vector<Bump> bumps) {
        return {Kind::SumOfBumps, std::move(bumps), {}};
    }
};

class Medium {
public:
    /// Validates node values and derives the bounds and the support box.
    Medium(Grid3 grid, Field c) : grid_(grid), c_(std::move(c)) {
        require(c_.size() == grid_.size(), "medium has ", c_.size(), " values, grid needs ",
                grid_.size());
        c0_ = c1_ = 1.0;
        for (std::size_t n = 0; n < c_.size(); ++n) {
            double v = c_[n];
            if (!std::isfinite(v)) {
                Index3 p = grid_.unlinear(n);
                throw ConfigError(detail::cat("non-finite medium value at node (", p.i, ",", p.j,
                                              ",", p.k, ") [linear index ", n, "]"));
            }
            if (v <= 0.0) {
                Index3 p = grid_.unlinear(n);
                throw ConfigError(detail::cat("medium coefficient must be positive, c=", v,
                                              " at node (", p.i, ",", p.j, ",", p.k, ")"));
            }
            c0_ = std::min(c0_, v);
            c1_ = std::max(c1_, v);
            if (v != 1.0) omega_ = omega_.expanded(grid_.node(grid_.unlinear(n)));
        }
        if (!omega_.empty) {
            Box inner = Box::of(grid_.origin() + Vec3{2 * grid_.h(), 2 * grid_.h(), 2 * grid_.h()},
                                grid_.bounds().hi - Vec3{2 * grid_.h(), 2 * grid_.h(),
                                                         2 * grid_.h()});
            require(inner.contains(omega_.lo) && inner.contains(omega_.hi),
                    "heterogeneity must keep 2 nodes of margin from the grid boundary");
        }
    }

    const Grid3& grid() const { return grid_; }
    const Field& values() const { return c_; }
    double operator[](std::size_t n) const { return c_[n]; }
    double at(Index3 p) const { return c_[grid_.linear(p)]; }
    double c0() const { return c0_; }
    double c1() const { return c1_; }
    /// Tight bounding box of the nodes with c != 1; empty for a homogeneous medium.
    const Box& omega_box() const { return omega_; }

    /// Content hash over grid geometry and coefficient bits.
    std::uint64_t fingerprint() const {
        Fnv1a64 f;
        f.update_value(grid_.nx());
        f.update_value(grid_.ny());
        f.update_value(grid_.nz());
        f.update_value(grid_.h());
        f.update_value(grid_.origin().x);
        f.update_value(grid_.origin().y);
        f.update_value(grid_.origin().z);
        f.update(c_);
        return f.digest();
    }

private:
    Grid3 grid_;
    Field c_;
    double c0_ = 1, c1_ = 1;
    Box omega_{};
};

/// Samples an analytic profile on the grid. FromFile profiles go through load_medium.
inline Medium build_medium(const MediumProfile& profile, const Grid3& grid) {
    require(profile.kind != MediumProfile::Kind::FromFile,
            "from-file media are loaded with load_medium");
    if (profile.kind == MediumProfile::Kind::RadialBump)
        require(profile.bumps.size() == 1, "radial-bump profile takes exactly one bump");

    const double h = grid.h();
    const Box margin = Box::of(grid.origin() + Vec3{2 * h, 2 * h, 2 * h},
                               grid.bounds().hi - Vec3{2 * h, 2 * h, 2 * h});
    for (const Bump& b : profile.bumps) {
        require(b.radius > 0, "bump radius must be positive, got ", b.radius);
        require(b.amplitude > -1.0, "bump amplitude must exceed -1, got ", b.amplitude);
        Box support = Box::around(b.center, b.radius);
        require(margin.contains(support.lo) && margin.contains(support.hi),
                "bump at (", b.center.x, ",", b.center.y, ",", b.center.z, ") radius ", b.radius,
                " reaches the 2-node boundary margin");
    }

    Field c(grid.size(), 1.0);
    if (profile.kind != MediumProfile::Kind::Constant) {
        for (int k = 0; k < grid.nz(); ++k)
            for (int j = 0; j < grid.ny(); ++j)
                for (int i = 0; i < grid.nx(); ++i) {
                    Vec3 x = grid.node(i, j, k);
                    double v = 1.0;
                    for (const Bump& b : profile.bumps) v += b.amplitude * b.shape(x);
                    c[grid.linear(i, j, k)] = v;
                }
    }
    return Medium(grid, std::move(c));
}

}  // namespace wk
