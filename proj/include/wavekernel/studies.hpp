#pragma once
/**
 * @file studies.hpp
 * @brief Scenario-level runs shared by the CLI and the acceptance checks:
 *        direct solve, representation formulas on a query set, and the
 *        operator-identity refinement study.
 */

#include <chrono>
#include <cmath>
#include <cstddef>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "kernel.hpp"
#include "medium.hpp"
#include "representation.hpp"
#include "scenario.hpp"
#include "skf_io.hpp"
#include "solve_config.hpp"
#include "validation.hpp"

namespace wk {

inline double scenario_dt(const Scenario& s, const Medium& m) { return cfl_dt(m.grid().h(), m.c0(), s.solve.cfl); }

inline std::size_t scenario_steps(const Scenario& s, const Medium& m) { return steps_for(s.T, scenario_dt(s, m)); }

/// Direct solution recorded on the region of interest.
inline FrameSet run_direct(const Scenario& s, const Medium& m) {
    require(!s.sampled, "direct solves need an analytic source");
    return direct_solve(m, s.source, s.T, s.solve_config());
}

/// Every node of the region at every step up to T.
inline QuerySet region_query(const Scenario& s, const Medium& m) {
    const Grid3& g = m.grid();
    return QuerySet::all_steps(QuerySet::nodes(g, g.nodes_in(s.region)), scenario_steps(s, m));
}

/// Frames sampled at the query points and steps, laid out like QueryResult::values.
inline std::vector<double> sample_frames(const FrameSet& y, const QuerySet& q) {
    std::vector<double> v;
    v.reserve(q.points.size() * q.steps.size());
    for (const Vec3& x : q.points)
        for (std::size_t n : q.steps) {
            require(n <= y.steps(), "query step ", n, " beyond the ", y.steps(), " recorded steps");
            v.push_back(interpolate(y, x, n));
        }
    return v;
}

inline std::vector<KernelTrace> scenario_traces(const Scenario& s, const Medium& m, const KernelBank* bank = nullptr,
                                                std::size_t* hits = nullptr) {
    const QuadratureSpec q = s.quadrature(m.grid());
    if (bank) {
        BankResult r = bank_get_or_solve(*bank, m, q.nodes(), s.T, s.solve_config(), s.jobs);
        if (hits) *hits = r.hits;
        return std::move(r.traces);
    }
    return solve_all(m, q.nodes(), s.T, s.solve_config(), s.jobs);
}

inline QueryResult run_formula(const Scenario& s, const Medium& m, const std::vector<KernelTrace>& traces,
                               const QuerySet& query, Formula formula) {
    const QuadratureSpec q = s.quadrature(m.grid());
    require(!traces.empty(), "no kernel traces");
    const std::size_t last = *std::max_element(query.steps.begin(), query.steps.end());
    SourceSpec src = source_spec(s, q, traces.front().dt(), last);
    return represent(traces, q, src, query, formula, s.reg(derivative_order(formula)), s.solve.partitions);
}

/// Same physical box with spacing h * 2^k (node counts rounded); k < 0 refines.
inline Scenario rescaled(const Scenario& s, int k) {
    Scenario c = s;
    const double f = std::ldexp(1.0, k);
    c.h = s.h * f;
    for (int a = 0; a < 3; ++a) c.n[a] = std::max(3, static_cast<int>(std::lround((s.n[a] - 1) / f)) + 1);
    return c;
}

/**
 * Applies the discrete operator to direct solutions at `levels` resolutions
 * (the scenario's own spacing, then successive halvings) and tabulates the
 * discrepancy against f on a box around the support of f. Boundary
 * reflections do not affect the identity, so padding is not enforced.
 */
inline ComparisonReport identity_refinement(const Scenario& s, int levels = 3, int stride = 2) {
    require(levels >= 2, "refinement needs at least 2 levels");
    require(!s.sampled, "the identity check needs an analytic source");
    require(s.medium.kind != MediumProfile::Kind::FromFile, "the identity check rebuilds the medium per level; ",
            "file media are not supported");
    const auto t0 = std::chrono::steady_clock::now();
    ComparisonReport out;
    for (int l = 0; l < levels; ++l) {
        Scenario c = rescaled(s, -l);
        Medium m = c.build();
        SolveConfig cfg = c.solve_config();
        const Box sup = c.source.support();
        const double margin = 0.25 * (sup.hi.x - sup.lo.x) + (stride + 1) * c.h;
        cfg.record = Box::of(sup.lo - Vec3{margin, margin, margin}, sup.hi + Vec3{margin, margin, margin});
        cfg.enforce_padding = false;
        FrameSet y = direct_solve(m, c.source, c.T, cfg);
        const std::size_t nt = scenario_steps(c, m);
        ComparisonReport r = verify_identity_220(y, m, c.source, stride, 0, nt);
        out.table.push_back({c.h, r.rel_l2, r.max_abs});
        out.rel_l2 = r.rel_l2;
        out.rel_max = r.rel_max;
        out.max_abs = r.max_abs;
        out.ref_l2 = r.ref_l2;
        out.ref_max = r.ref_max;
        out.count = r.count;
    }
    finalize_orders(out);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

/// err[i] / err[i+1] along a refinement table (L2 column).
inline std::vector<double> reduction_factors(const ComparisonReport& r) {
    std::vector<double> f;
    for (std::size_t i = 0; i + 1 < r.table.size(); ++i) f.push_back(r.table[i].rel_l2 / r.table[i + 1].rel_l2);
    return f;
}

}  // namespace wk
