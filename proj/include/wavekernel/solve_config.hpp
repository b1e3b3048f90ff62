#pragma once

#include <cmath>
#include <cstddef>
#include <optional>

#include "error.hpp"
#include "fdtd.hpp"
#include "grid.hpp"

namespace wk {

/// Time-stepping options shared by kernel and direct solves.
struct SolveConfig {
    double cfl = 0.9;                 // safety factor sigma in (0, 1]
    int partitions = 1;               // z-slabs updated concurrently
    std::optional<Box> record;        // stored region; whole grid when unset
    Sponge sponge{};                  // approximate absorbing layer (off by default)
    bool cap_radius = false;          // allow xi off cell centres: r <- max(r, h/2)
    bool enforce_padding = true;      // reject grids too small for the horizon
    int extra_steps = 1;              // frames beyond T, needed for centred D_t^2 at t = T
    double source_delay = 0.0;        // verification only: solve with g(t - delay)
};

/// Number of steps covering [0, T] on a dt lattice (rounded up), without extras.
inline std::size_t steps_for(double T, double dt) {
    require(T >= 0 && dt > 0, "invalid horizon T=", T, " dt=", dt);
    return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

inline IndexBox record_range(const Grid3& g, const SolveConfig& cfg) {
    return cfg.record ? g.nodes_in(*cfg.record) : g.all();
}

inline Grid3 subgrid(const Grid3& g, const IndexBox& r) {
    return Grid3(r.nx(), r.ny(), r.nz(), g.h(), g.node(r.lo));
}

}  // namespace wk
