#pragma once
// Zero-data leapfrog run that records every level on a node range.

#include <algorithm>
#include <cstddef>

#include "fdtd.hpp"
#include "grid.hpp"
#include "medium.hpp"
#include "skf_io.hpp"
#include "solve_config.hpp"

namespace wk {

/// Frames 0..steps of the solution of c v_tt - Lap v = src, v = v_t = 0 at t = 0.
template <class Source>
FrameSet run_recorded(const Medium& medium, const Source& src, double dt, std::size_t steps, const IndexBox& rec,
                      int partitions = 1, Sponge sponge = {}) {
    const Grid3& g = medium.grid();
    FrameSet out(subgrid(g, rec), dt, steps + 1);
    auto record = [&](std::size_t n, const Field& level) {
        auto f = out.frame(n);
        for (int k = rec.lo.k; k <= rec.hi.k; ++k)
            for (int j = rec.lo.j; j <= rec.hi.j; ++j)
                std::copy_n(level.begin() + static_cast<std::ptrdiff_t>(g.linear(rec.lo.i, j, k)), rec.nx(),
                            f.begin() + static_cast<std::ptrdiff_t>(rec.offset({rec.lo.i, j, k})));
    };
    Leapfrog lf(medium, dt, partitions, sponge);
    if (steps == 0) return out;
    WaveState st = lf.start(src);
    record(1, st.curr);
    for (std::size_t n = 1; n < steps; ++n) {
        lf.advance(st, src);
        record(n + 1, st.curr);
    }
    return out;
}

}  // namespace wk
