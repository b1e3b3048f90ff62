#pragma once
/**
 * @file representation.hpp
 * @brief Space-time convolution of kernel traces against a source.
 *
 * With xi_j the cell centres of G_f (weights W_j = cell volume) and tau_m = m dt,
 *
 *     p_f(x, t_n) = sum_j W_j sum_m' dt w(x, xi_j, t_n - tau_m) f(xi_j, tau_m)
 *     y_v1        = same with d^4 f / dtau^4
 *     y_v2        = sum_j W_j sum_m' dt D_t^2 w(x, xi_j, t_n - tau_m) d^2 f / dtau^2
 *
 * where sum' is the trapezoid rule over m = 0..n and D_t^2 is the centred second
 * difference on trace frames (w vanishes for t <= 0).
 */

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "fdtd.hpp"
#include "grid.hpp"
#include "kernel.hpp"
#include "regdiff.hpp"
#include "source.hpp"

namespace wk {

/// Midpoint rule over cells of the box G_f; nodes at cell centres.
struct QuadratureSpec {
    Box region{};
    std::array<int, 3> cells{4, 4, 4};

    std::size_t size() const {
        return static_cast<std::size_t>(cells[0]) * static_cast<std::size_t>(cells[1]) *
               static_cast<std::size_t>(cells[2]);
    }
    Vec3 cell_size() const {
        return {(region.hi.x - region.lo.x) / cells[0], (region.hi.y - region.lo.y) / cells[1],
                (region.hi.z - region.lo.z) / cells[2]};
    }
    double weight() const {
        Vec3 c = cell_size();
        return c.x * c.y * c.z;
    }
    /// Node j, x-fastest.
    Vec3 node(std::size_t j) const {
        const auto a = static_cast<std::size_t>(cells[0]), b = static_cast<std::size_t>(cells[1]);
        Vec3 c = cell_size();
        double i0 = static_cast<double>(j % a) + 0.5, i1 = static_cast<double>((j / a) % b) + 0.5,
               i2 = static_cast<double>(j / (a * b)) + 0.5;
        return {region.lo.x + i0 * c.x, region.lo.y + i1 * c.y, region.lo.z + i2 * c.z};
    }
    std::vector<Vec3> nodes() const {
        std::vector<Vec3> v(size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = node(j);
        return v;
    }

    void validate() const {
        require(!region.empty && region.volume() > 0, "quadrature region must be a non-degenerate box");
        require(cells[0] > 0 && cells[1] > 0 && cells[2] > 0, "quadrature cell counts must be positive");
    }

    /// Cubic cells of `per_axis` grid spacings covering `target` (G_f's support
    /// box), placed as symmetrically as the grid allows with every centre on a
    /// grid cell centre.
    static QuadratureSpec aligned(const Grid3& g, const Box& target, int per_axis) {
        require(per_axis >= 1, "quadrature cell must span at least one grid spacing");
        require(!target.empty, "quadrature target box is empty");
        const double h = g.h(), d = per_axis * h;
        QuadratureSpec q;
        Vec3 lo, hi;
        for (int a = 0; a < 3; ++a) {
            const double width = target.hi[a] - target.lo[a];
            int n = std::max(1, static_cast<int>(std::ceil(width / d - 1e-9)));
            double mid = 0.5 * (target.lo[a] + target.hi[a]);
            double first = mid - 0.5 * (n - 1) * d;
            // snap to origin + (j + 1/2) h
            double j = std::round((first - g.origin()[a]) / h - 0.5);
            first = g.origin()[a] + (j + 0.5) * h;
            if (first - 0.5 * d > target.lo[a] + 1e-9 * h || first + (n - 0.5) * d < target.hi[a] - 1e-9 * h) ++n;
            if (first - 0.5 * d > target.lo[a] + 1e-9 * h) first -= d;
            lo[a] = first - 0.5 * d;
            hi[a] = lo[a] + n * d;
            q.cells[static_cast<std::size_t>(a)] = n;
        }
        q.region = Box::of(lo, hi);
        return q;
    }

    /// n^3 cells covering `target` with edge target-width/n (centres not snapped).
    static QuadratureSpec uniform(const Box& target, int n) {
        QuadratureSpec q;
        q.region = target;
        q.cells = {n, n, n};
        return q;
    }
};

/// Query points crossed with time steps.
struct QuerySet {
    std::vector<Vec3> points;
    std::vector<std::size_t> steps;

    static QuerySet all_steps(std::vector<Vec3> pts, std::size_t last_step) {
        QuerySet q;
        q.points = std::move(pts);
        q.steps.resize(last_step + 1);
        for (std::size_t n = 0; n <= last_step; ++n) q.steps[n] = n;
        return q;
    }
    /// Every node of `r` on grid g.
    static std::vector<Vec3> nodes(const Grid3& g, const IndexBox& r) {
        std::vector<Vec3> v;
        v.reserve(r.size());
        for (int k = r.lo.k; k <= r.hi.k; ++k)
            for (int j = r.lo.j; j <= r.hi.j; ++j)
                for (int i = r.lo.i; i <= r.hi.i; ++i) v.push_back(g.node(i, j, k));
        return v;
    }
};

/// values[p * steps.size() + s] for point p and step index s.
struct QueryResult {
    QuerySet query;
    double dt = 0;
    std::vector<double> values;

    double at(std::size_t p, std::size_t s) const { return values[p * query.steps.size() + s]; }
};

/// d^k f / dtau^k at (xi_j, m dt): table[j][m].
using DerivativeTable = std::vector<std::vector<double>>;

inline DerivativeTable tabulate(const AnalyticSource& f, const QuadratureSpec& q, double dt, std::size_t steps,
                                int order) {
    f.psi.validate();
    DerivativeTable t(q.size(), std::vector<double>(steps + 1));
    for (std::size_t j = 0; j < q.size(); ++j) {
        Vec3 xi = q.node(j);
        for (std::size_t m = 0; m <= steps; ++m) t[j][m] = f.dt_k(order, xi, static_cast<double>(m) * dt);
    }
    return t;
}

/// Regularized derivatives of sampled series (one series per quadrature node).
inline DerivativeTable tabulate(const SampledSource& f, const QuadratureSpec& q, double dt, std::size_t steps,
                                int order, const RegConfig& reg) {
    require(f.series.size() == q.size(), "sampled source has ", f.series.size(), " series, quadrature has ",
            q.size(), " nodes");
    require(std::abs(f.dt - dt) <= 1e-12 * dt, "sampled source spacing ", f.dt, " differs from kernel dt ", dt);
    DerivativeTable t(q.size());
    for (std::size_t j = 0; j < q.size(); ++j) {
        require(f.series[j].size() >= steps + 1, "sampled series ", j, " has ", f.series[j].size(),
                " samples, need ", steps + 1);
        if (order == 0) {
            t[j].assign(f.series[j].begin(), f.series[j].begin() + static_cast<std::ptrdiff_t>(steps + 1));
            continue;
        }
        NoisySignal sig{dt, f.series[j], f.noise};
        RegConfig rc = reg;
        if (f.noise == 0.0 && std::holds_alternative<regdiff::Auto>(rc.alpha)) rc.alpha = regdiff::None{};
        DerivativeResult d = derivative(sig, order, rc);
        t[j].assign(d.values.begin(), d.values.begin() + static_cast<std::ptrdiff_t>(steps + 1));
    }
    return t;
}

enum class Formula { PF, V1, V2 };

inline int derivative_order(Formula f) {
    switch (f) {
        case Formula::PF: return 0;
        case Formula::V1: return 4;
        default: return 2;
    }
}

/**
 * Core convolution. `traces[j]` belongs to quadrature node j. Points are processed
 * in `partitions` independent ranges; each value is summed in a fixed order.
 */
inline QueryResult convolve(const std::vector<KernelTrace>& traces, const QuadratureSpec& q,
                            const DerivativeTable& table, const QuerySet& query, Formula formula,
                            int partitions = 1) {
    q.validate();
    require(traces.size() == q.size(), "have ", traces.size(), " kernel traces for ", q.size(),
            " quadrature nodes");
    require(table.size() == q.size(), "derivative table does not match the quadrature");
    QueryResult out;
    out.query = query;
    out.values.assign(query.points.size() * query.steps.size(), 0.0);
    if (query.points.empty() || query.steps.empty()) return out;

    const double dt = traces.front().dt();
    out.dt = dt;
    const std::size_t last = *std::max_element(query.steps.begin(), query.steps.end());
    const std::size_t need = formula == Formula::V2 ? last + 1 : last;
    for (std::size_t j = 0; j < traces.size(); ++j) {
        const KernelTrace& tr = traces[j];
        require(distance(tr.xi, q.node(j)) <= 1e-9 * tr.grid.h(), "trace ", j, " is for xi=(", tr.xi.x, ",",
                tr.xi.y, ",", tr.xi.z, "), quadrature node differs");
        require(tr.dt() == dt, "kernel traces use different time steps");
        require(tr.steps() >= need, "horizon shortfall: trace ", j, " has ", tr.steps(), " steps, query needs ",
                need);
        require(table[j].size() >= last + 1, "source derivatives cover ", table[j].size(), " steps, need ",
                last + 1);
    }
    const double W = q.weight();
    const double inv_dt2 = 1.0 / (dt * dt);

    auto body = [&](int p0, int p1) {
        std::vector<double> w(need + 2);
        std::vector<double> kern(last + 1);
        for (int p = p0; p < p1; ++p) {
            const Vec3 x = query.points[static_cast<std::size_t>(p)];
            double* row = out.values.data() + static_cast<std::size_t>(p) * query.steps.size();
            for (std::size_t j = 0; j < traces.size(); ++j) {
                const KernelTrace& tr = traces[j];
                for (std::size_t k = 0; k <= need; ++k) w[k] = assemble_w_at(tr, x, k);
                if (formula == Formula::V2) {
                    for (std::size_t k = 0; k <= last; ++k)
                        kern[k] = ((k > 0 ? w[k - 1] : 0.0) - 2.0 * w[k] + w[k + 1]) * inv_dt2;
                } else {
                    std::copy_n(w.begin(), last + 1, kern.begin());
                }
                const std::vector<double>& F = table[j];
                for (std::size_t s = 0; s < query.steps.size(); ++s) {
                    const std::size_t n = query.steps[s];
                    if (n == 0) continue;
                    double acc = 0.5 * (kern[n] * F[0] + kern[0] * F[n]);
                    for (std::size_t m = 1; m < n; ++m) acc += kern[n - m] * F[m];
                    row[s] += W * dt * acc;
                }
            }
        }
    };
    for_slabs(0, static_cast<int>(query.points.size()), partitions, body);
    return out;
}

/// Formula dispatch for either source kind.
inline QueryResult represent(const std::vector<KernelTrace>& traces, const QuadratureSpec& q,
                             const SourceSpec& source, const QuerySet& query, Formula formula,
                             const RegConfig& reg = {}, int partitions = 1) {
    require(!traces.empty(), "no kernel traces");
    require(!query.steps.empty(), "empty query time set");
    const double dt = traces.front().dt();
    const std::size_t last = *std::max_element(query.steps.begin(), query.steps.end());
    const int order = derivative_order(formula);
    DerivativeTable table = std::visit(
        [&](const auto& f) -> DerivativeTable {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, AnalyticSource>)
                return tabulate(f, q, dt, last, order);
            else
                return tabulate(f, q, dt, last, order, reg);
        },
        source);
    return convolve(traces, q, table, query, formula, partitions);
}

inline QueryResult compute_pf(const std::vector<KernelTrace>& traces, const QuadratureSpec& q,
                              const SourceSpec& source, const QuerySet& query, int partitions = 1) {
    return represent(traces, q, source, query, Formula::PF, {}, partitions);
}

inline QueryResult solve_y_v1(const std::vector<KernelTrace>& traces, const QuadratureSpec& q,
                              const SourceSpec& source, const QuerySet& query, const RegConfig& reg = {},
                              int partitions = 1) {
    return represent(traces, q, source, query, Formula::V1, reg, partitions);
}

inline QueryResult solve_y_v2(const std::vector<KernelTrace>& traces, const QuadratureSpec& q,
                              const SourceSpec& source, const QuerySet& query, const RegConfig& reg = {},
                              int partitions = 1) {
    return represent(traces, q, source, query, Formula::V2, reg, partitions);
}

/// Bank-backed variants: traces for every quadrature node are fetched or solved first.
inline std::vector<KernelTrace> traces_for(const KernelBank& bank, const Medium& medium, const QuadratureSpec& q,
                                           double T, const SolveConfig& cfg, int jobs = 1) {
    return bank_get_or_solve(bank, medium, q.nodes(), T, cfg, jobs).traces;
}

}  // namespace wk
