#pragma once
/**
 * @file kernel.hpp
 * @brief Regularized kernel traces, kernel assembly and the on-disk kernel bank.
 *
 * For a source point xi the regularized kernel wt solves
 *
 *     c wt_tt - Lap wt = g,   g = -(c - 1) (t - r)_+ / (4 pi r),   wt = wt_t = 0 at t = 0,
 *
 * and the kernel is w = wt + (t - r)_+^3 / (24 pi r). Only tau = 0 is solved; a
 * source time tau is handled downstream through w(x, xi, t - tau).
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "analytic.hpp"
#include "driver.hpp"
#include "error.hpp"
#include "fdtd.hpp"
#include "grid.hpp"
#include "medium.hpp"
#include "skf_io.hpp"
#include "solve_config.hpp"

namespace wk {

/// Snapshots of wt at steps 0..steps on a recorded node range.
struct KernelTrace {
    Vec3 xi{};
    Grid3 grid;          // full computational grid
    IndexBox record{};   // recorded node range of `grid`
    FrameSet frames;     // grid = recorded subgrid
    std::uint64_t fingerprint = 0;
    Singularity singularity{};

    double dt() const { return frames.dt; }
    std::size_t steps() const { return frames.steps(); }
    double horizon() const { return static_cast<double>(steps()) * dt(); }

    /// wt at a node of the full grid.
    double wtilde(Index3 node, std::size_t n) const {
        require(record.contains(node) && n <= steps(), "kernel query out of range: node (", node.i,
                ",", node.j, ",", node.k, ") step ", n, " (trace has ", steps(), " steps)");
        return frames.frame(n)[record.offset(node)];
    }

    /// wt at an arbitrary point of the recorded region, trilinear between nodes.
    double wtilde_at(Vec3 x, std::size_t n) const {
        require(n <= steps(), "kernel query beyond horizon: step ", n, " of ", steps());
        return interpolate(frames, x, n);
    }
};

namespace detail {

inline void check_singularity(const Medium& m, Vec3 xi, const Singularity& s) {
    if (m.omega_box().empty || s.cap) return;
    const Grid3& g = m.grid();
    IndexBox ob = g.nodes_in(m.omega_box());
    for (int k = ob.lo.k; k <= ob.hi.k; ++k)
        for (int j = ob.lo.j; j <= ob.hi.j; ++j)
            for (int i = ob.lo.i; i <= ob.hi.i; ++i) {
                if (m.at({i, j, k}) == 1.0) continue;
                double r = distance(g.node(i, j, k), xi);
                if (r < s.min_radius)
                    throw NumericError(cat("kernel singularity: xi=(", xi.x, ",", xi.y, ",", xi.z,
                                           ") is ", r, " from heterogeneous node (", i, ",", j, ",",
                                           k, "); place xi at a cell centre or enable radius capping"));
            }
}

inline void check_padding(const Medium& m, const Box& sources, const SolveConfig& cfg, double T) {
    if (!cfg.enforce_padding || !cfg.record || cfg.sponge.width > 0) return;
    Padding pad = required_padding(sources, *cfg.record, m.grid(), T, m.c0());
    for (int p : pad)
        require(p == 0, "grid too small for horizon T=", T, ": boundary reflections reach the ",
                "recorded region; pad faces (-x,+x,-y,+y,-z,+z) by ", pad[0], ",", pad[1], ",",
                pad[2], ",", pad[3], ",", pad[4], ",", pad[5], " nodes");
}

/// Calls fn(0..count-1) on up to `jobs` threads; the first exception is rethrown.
template <class Fn>
void run_jobs(std::size_t count, int jobs, Fn&& fn) {
    std::mutex mu;
    std::size_t next = 0;
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            std::size_t idx;
            {
                std::lock_guard lock(mu);
                if (next >= count || failure) return;
                idx = next++;
            }
            try {
                fn(idx);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (int w = 1; w < std::min<int>(std::max(1, jobs), static_cast<int>(std::max<std::size_t>(count, 1))); ++w)
            pool.emplace_back(worker);
        worker();
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

inline KernelTrace solve_wtilde(const Medium& medium, Vec3 xi, double T, const SolveConfig& cfg = {}) {
    const Grid3& g = medium.grid();
    const double dt = cfl_dt(g.h(), medium.c0(), cfg.cfl);
    const std::size_t nt = steps_for(T, dt) + static_cast<std::size_t>(std::max(0, cfg.extra_steps));

    KernelTrace tr;
    tr.xi = xi;
    tr.grid = g;
    tr.record = record_range(g, cfg);
    tr.fingerprint = medium.fingerprint();
    tr.singularity = Singularity{0.5 * g.h(), cfg.cap_radius};

    detail::check_singularity(medium, xi, tr.singularity);
    detail::check_padding(medium, medium.omega_box().expanded(xi), cfg, T);

    if (medium.omega_box().empty) {
        // g vanishes identically.
        tr.frames = run_recorded(medium, ZeroSource{}, dt, nt, tr.record, cfg.partitions, cfg.sponge);
        return tr;
    }
    SourceG gsrc{&medium, xi, cfg.source_delay, tr.singularity};
    NodeSource src{g.nodes_in(medium.omega_box()),
                   [&gsrc](Index3 p, double t) { return eval_source_g(gsrc, p, t); }};
    tr.frames = run_recorded(medium, src, dt, nt, tr.record, cfg.partitions, cfg.sponge);
    return tr;
}

/// w = wt + tail at a node and step.
inline double assemble_w(const KernelTrace& tr, Index3 node, std::size_t n) {
    double wt = tr.wtilde(node, n);
    return wt + eval_tail(tr.xi, 0.0, tr.grid.node(node), static_cast<double>(n) * tr.dt(),
                          tr.singularity);
}

/// w at an arbitrary point: interpolated wt plus the exact tail.
inline double assemble_w_at(const KernelTrace& tr, Vec3 x, std::size_t n) {
    return tr.wtilde_at(x, n) + eval_tail(tr.xi, 0.0, x, static_cast<double>(n) * tr.dt(), tr.singularity);
}

/// Whole-frame assembly over the recorded region.
inline Field assemble_w_frame(const KernelTrace& tr, std::size_t n) {
    require(n <= tr.steps(), "assemble_w_frame: step ", n, " beyond horizon ", tr.steps());
    Field out(tr.record.size());
    const IndexBox& r = tr.record;
    for (int k = r.lo.k; k <= r.hi.k; ++k)
        for (int j = r.lo.j; j <= r.hi.j; ++j)
            for (int i = r.lo.i; i <= r.hi.i; ++i) out[r.offset({i, j, k})] = assemble_w(tr, {i, j, k}, n);
    return out;
}

/**
 * Directory of kernel traces: <root>/<medium fingerprint>/<xi key>.skf.
 * A hit must match the active medium bit-exactly (fingerprint) and cover the
 * requested horizon and region; anything else is reported as a stale entry.
 */
class KernelBank {
public:
    explicit KernelBank(std::filesystem::path root) : root_(std::move(root)) {}

    const std::filesystem::path& root() const { return root_; }

    std::filesystem::path entry_path(const Medium& m, Vec3 xi) const {
        return root_ / hex64(m.fingerprint()) / (xi_key(m.grid(), xi) + ".skf");
    }

    /// Cell index i-j-k of xi; off-centre points get a hash suffix.
    static std::string xi_key(const Grid3& g, Vec3 xi) {
        int c[3];
        for (int a = 0; a < 3; ++a) c[a] = static_cast<int>(std::floor((xi[a] - g.origin()[a]) / g.h()));
        std::string key = std::to_string(c[0]) + "-" + std::to_string(c[1]) + "-" + std::to_string(c[2]);
        if (!g.is_cell_center(xi)) {
            Fnv1a64 f;
            f.update_value(xi.x);
            f.update_value(xi.y);
            f.update_value(xi.z);
            key += "-" + hex64(f.digest()).substr(0, 8);
        }
        return key;
    }

    bool contains(const Medium& m, Vec3 xi) const { return std::filesystem::exists(entry_path(m, xi)); }

    void store(const KernelTrace& tr, const Medium& m) const {
        require(tr.fingerprint == m.fingerprint(), "trace was solved for a different medium");
        save_frames(tr.frames, entry_path(m, tr.xi), KernelMeta{tr.xi, tr.fingerprint});
    }

    /// Loads an entry; throws on checksum failure or a stale/insufficient entry.
    KernelTrace load(const Medium& m, Vec3 xi, double T, const SolveConfig& cfg) const {
        auto path = entry_path(m, xi);
        LoadedFrames lf = load_frames(path);
        require(lf.meta.has_value(), path.string(), ": not a kernel frame set");
        const std::string stale = "stale kernel bank entry " + path.string() + ": ";
        require(lf.meta->fingerprint == m.fingerprint(), stale, "medium fingerprint ",
                hex64(lf.meta->fingerprint), " does not match active medium ", hex64(m.fingerprint()),
                "; remove the entry to invalidate it");
        require(lf.meta->xi == xi, stale, "stored source point differs");
        const Grid3& g = m.grid();
        const double dt = cfl_dt(g.h(), m.c0(), cfg.cfl);
        require(lf.frames.dt == dt, stale, "time step ", lf.frames.dt, " != requested ", dt);
        const std::size_t nt = steps_for(T, dt) + static_cast<std::size_t>(std::max(0, cfg.extra_steps));
        require(lf.frames.steps() >= nt, stale, "horizon of ", lf.frames.steps(), " steps, need ", nt);
        KernelTrace tr;
        tr.xi = xi;
        tr.grid = g;
        tr.record = IndexBox{g.nearest(lf.frames.grid.origin()), {}};
        tr.record.hi = {tr.record.lo.i + lf.frames.grid.nx() - 1, tr.record.lo.j + lf.frames.grid.ny() - 1,
                        tr.record.lo.k + lf.frames.grid.nz() - 1};
        require(g.is_node(lf.frames.grid.origin()) && g.in_range(tr.record.hi), stale,
                "recorded region is not aligned with the medium grid");
        IndexBox want = record_range(g, cfg);
        require(tr.record.contains(want.lo) && tr.record.contains(want.hi), stale,
                "recorded region does not cover the requested region");
        tr.frames = std::move(lf.frames);
        tr.fingerprint = lf.meta->fingerprint;
        tr.singularity = Singularity{0.5 * g.h(), cfg.cap_radius};
        return tr;
    }

private:
    std::filesystem::path root_;
};

struct BankResult {
    std::vector<KernelTrace> traces;
    std::size_t hits = 0, misses = 0;
};

/**
 * Serves every xi from the bank, solving and storing the misses. Misses are
 * solved on up to `jobs` threads; each result is written by exactly one thread.
 */
inline BankResult bank_get_or_solve(const KernelBank& bank, const Medium& medium, const std::vector<Vec3>& xis,
                                    double T, const SolveConfig& cfg, int jobs = 1) {
    BankResult out;
    out.traces.resize(xis.size());
    std::vector<std::size_t> todo;
    for (std::size_t j = 0; j < xis.size(); ++j) {
        if (bank.contains(medium, xis[j])) {
            out.traces[j] = bank.load(medium, xis[j], T, cfg);
            ++out.hits;
        } else {
            todo.push_back(j);
        }
    }
    out.misses = todo.size();
    detail::run_jobs(todo.size(), jobs, [&](std::size_t t) {
        const std::size_t idx = todo[t];
        KernelTrace tr = solve_wtilde(medium, xis[idx], T, cfg);
        bank.store(tr, medium);
        out.traces[idx] = std::move(tr);
    });
    return out;
}

/// Solves every xi without a bank, on up to `jobs` threads.
inline std::vector<KernelTrace> solve_all(const Medium& medium, const std::vector<Vec3>& xis, double T,
                                          const SolveConfig& cfg, int jobs = 1) {
    std::vector<KernelTrace> out(xis.size());
    detail::run_jobs(xis.size(), jobs, [&](std::size_t j) { out[j] = solve_wtilde(medium, xis[j], T, cfg); });
    return out;
}

}  // namespace wk
