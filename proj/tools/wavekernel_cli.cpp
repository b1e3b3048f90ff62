// wavekernel: command-line front end.
//
//   medium   build a medium from a config and save it
//   kernel   solve regularized kernels into a bank
//   deriv    regularized time derivatives of sampled data
//   solve    evaluate y through a representation formula
//   direct   direct leapfrog solve
//   verify   operator-identity refinement study
//   compare  discrepancy between two result files
//   export   SKF1 to CSV

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdint>
#include <numeric>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "manifest.hpp"
#include "wavekernel/wavekernel.hpp"

namespace fs = std::filesystem;
using wkcli::json;
using wkcli::RunManifest;

namespace {

struct Common {
    std::string config;
    int partitions = 0;
    int jobs = 0;
    std::string manifest;
};

wk::Scenario load(const Common& c) {
    wk::Scenario s = c.config.empty() ? wk::standard_scenario() : wk::load_scenario(c.config);
    if (c.partitions > 0) s.solve.partitions = c.partitions;
    if (c.jobs > 0) s.jobs = c.jobs;
    return s;
}

void add_common(CLI::App* app, Common& c, bool with_config = true) {
    if (with_config) app->add_option("--config", c.config, "scenario config file (default: standard scenario)");
    app->add_option("--partitions", c.partitions, "spatial partitions per time step")->check(CLI::PositiveNumber);
    app->add_option("--jobs", c.jobs, "concurrent kernel solves")->check(CLI::PositiveNumber);
    app->add_option("--manifest", c.manifest, "manifest path (default: next to the main output)");
}

fs::path manifest_path(const Common& c, const fs::path& main_output) {
    if (!c.manifest.empty()) return c.manifest;
    fs::path p = main_output;
    p += ".manifest.json";
    return p;
}

std::array<int, 3> parse_triplet(const std::string& s) {
    std::array<int, 3> n{};
    char x1 = 0, x2 = 0;
    std::istringstream in(s);
    if (!(in >> n[0] >> x1 >> n[1] >> x2 >> n[2]) || x1 != 'x' || x2 != 'x' || !in.eof() || n[0] < 1 || n[1] < 1 ||
        n[2] < 1)
        throw wk::ConfigError("expected NxNxN with positive counts, got '" + s + "'");
    return n;
}

wk::Vec3 parse_vec(const std::string& s) {
    std::vector<double> v;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw wk::ConfigError("expected x,y,z, got '" + s + "'");
        }
    }
    if (v.size() != 3) throw wk::ConfigError("expected x,y,z, got '" + s + "'");
    return {v[0], v[1], v[2]};
}

wk::AlphaChoice parse_alpha(const std::string& s) {
    if (s == "auto") return wk::regdiff::Auto{};
    if (s == "none") return wk::regdiff::None{};
    try {
        std::size_t used = 0;
        double a = std::stod(s, &used);
        if (used == s.size() && a > 0) return wk::regdiff::Fixed{a};
    } catch (const std::exception&) {
    }
    throw wk::ConfigError("alpha must be auto, none or a positive number, got '" + s + "'");
}

json report_json(const wk::ComparisonReport& r) {
    json j;
    j["rel_l2"] = r.rel_l2;
    j["rel_max"] = r.rel_max;
    j["max_abs"] = r.max_abs;
    j["ref_l2"] = r.ref_l2;
    j["ref_max"] = r.ref_max;
    j["count"] = r.count;
    json t = json::array();
    for (const auto& row : r.table) t.push_back({{"h", row.h}, {"rel_l2", row.rel_l2}, {"max_abs", row.max_abs}});
    j["table"] = t;
    j["orders_l2"] = r.orders_l2;
    j["orders_max"] = r.orders_max;
    j["seconds"] = r.seconds;
    return j;
}

void print_report(const wk::ComparisonReport& r) {
    std::printf("rel_l2 %.6e  rel_max %.6e  max_abs %.6e  (%zu values)\n", r.rel_l2, r.rel_max, r.max_abs, r.count);
    if (!r.table.empty()) {
        std::printf("%12s %14s %14s\n", "h", "rel_l2", "max_abs");
        for (const auto& row : r.table) std::printf("%12.6g %14.6e %14.6e\n", row.h, row.rel_l2, row.max_abs);
        for (std::size_t i = 0; i < r.orders_l2.size(); ++i)
            std::printf("order %zu: l2 %.3f  max %.3f\n", i + 1, r.orders_l2[i], r.orders_max[i]);
    }
}

/// Either an x,y,z,t,value CSV or an SKF1 frame set, flattened in a common order.
struct Table {
    std::vector<double> keys;  // x,y,z,t per row
    std::vector<double> values;
};

// Rows ordered by point, then time, whatever the file layout.
Table sorted(const Table& t) {
    std::vector<std::size_t> order(t.values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto key = [&](std::size_t r) {
        return std::array<double, 4>{t.keys[4 * r], t.keys[4 * r + 1], t.keys[4 * r + 2], t.keys[4 * r + 3]};
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    Table out;
    for (std::size_t r : order) {
        auto k = key(r);
        out.keys.insert(out.keys.end(), k.begin(), k.end());
        out.values.push_back(t.values[r]);
    }
    return out;
}

Table read_result(const fs::path& path) {
    Table t;
    if (path.extension() == ".skf") {
        wk::LoadedFrames lf = wk::load_frames(path);
        const wk::FrameSet& f = lf.frames;
        for (std::size_t n = 0; n <= f.steps(); ++n)
            for (std::size_t i = 0; i < f.grid.size(); ++i) {
                wk::Vec3 x = f.grid.node(f.grid.unlinear(i));
                t.keys.insert(t.keys.end(), {x.x, x.y, x.z, static_cast<double>(n) * f.dt});
                t.values.push_back(f.frame(n)[i]);
            }
        return t;
    }
    for (const auto& r : wk::csv::detail::read_rows(path, 5)) {
        t.keys.insert(t.keys.end(), {r[0], r[1], r[2], r[3]});
        t.values.push_back(r[4]);
    }
    return t;
}

// ---------------------------------------------------------------------------

int cmd_medium(const Common& c, const std::string& out, RunManifest& man) {
    wk::Scenario s = load(c);
    wk::Medium m = s.build();
    wk::save_medium(m, out);
    const wk::Grid3& g = m.grid();
    std::printf("grid %dx%dx%d h=%g  c0=%g c1=%g  fingerprint %s\n", g.nx(), g.ny(), g.nz(), g.h(), m.c0(), m.c1(),
                wk::hex64(m.fingerprint()).c_str());
    man.config = wk::to_config(s);
    man.fingerprint = m.fingerprint();
    man.outputs.push_back(out);
    man.write(manifest_path(c, out));
    return 0;
}

struct KernelArgs {
    std::string medium, bank, xi_grid, xi_center;
    double T = -1;
    int spacing = 0;
    double cfl = 0;
};

int cmd_kernel(const Common& c, const KernelArgs& a, RunManifest& man) {
    std::optional<wk::Scenario> s;
    if (!c.config.empty()) s = load(c);
    wk::Medium m = !a.medium.empty() ? wk::load_medium(a.medium) : (s ? s->build() : wk::standard_scenario().build());
    wk::SolveConfig cfg = s ? s->solve_config() : wk::SolveConfig{};
    if (c.partitions > 0) cfg.partitions = c.partitions;
    if (a.cfl > 0) cfg.cfl = a.cfl;
    const double T = a.T >= 0 ? a.T : (s ? s->T : 2.0);
    const int jobs = c.jobs > 0 ? c.jobs : (s ? s->jobs : 1);

    // Without --xi-grid: the quadrature nodes the solve command uses.
    // Otherwise a block of cell centres, `spacing` cells apart, centred on the requested point.
    const wk::Grid3& g = m.grid();
    const wk::Scenario base = s ? *s : wk::standard_scenario();
    const int spacing = a.spacing > 0 ? a.spacing : base.per_axis;
    std::vector<wk::Vec3> xis;
    if (a.xi_grid.empty()) xis = base.quadrature(g).nodes();
    const auto n = a.xi_grid.empty() ? std::array<int, 3>{0, 0, 0} : parse_triplet(a.xi_grid);
    const wk::Vec3 want = a.xi_center.empty() ? (s ? s->source.phi.center : g.bounds().lo + 0.5 * (g.bounds().hi - g.bounds().lo))
                                              : parse_vec(a.xi_center);
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                wk::Vec3 p;
                const int idx[3] = {i, j, k};
                for (int ax = 0; ax < 3; ++ax) {
                    double off = (idx[ax] - 0.5 * (n[ax] - 1)) * spacing * g.h();
                    double q = std::floor((want[ax] + off - g.origin()[ax]) / g.h());
                    p[ax] = g.origin()[ax] + (q + 0.5) * g.h();
                }
                xis.push_back(p);
            }
    wk::KernelBank bank(a.bank);
    wk::BankResult r = wk::bank_get_or_solve(bank, m, xis, T, cfg, jobs);
    for (const wk::Vec3& xi : xis) man.bank_keys.push_back(fs::relative(bank.entry_path(m, xi), a.bank).string());
    std::printf("%zu kernel entries (%zu solved, %zu from bank) in %s\n", xis.size(), r.misses, r.hits,
                a.bank.c_str());
    if (s) man.config = wk::to_config(*s);
    man.fingerprint = m.fingerprint();
    if (!a.medium.empty()) man.inputs.push_back(a.medium);
    man.results = {{"T", T}, {"cfl", cfg.cfl}, {"solved", r.misses}, {"hits", r.hits}};
    man.write(c.manifest.empty() ? fs::path(a.bank) / "kernel.manifest.json" : fs::path(c.manifest));
    return 0;
}

struct DerivArgs {
    std::string input, out, alpha = "auto";
    int order = 2;
    double noise = 0;
};

int cmd_deriv(const Common& c, const DerivArgs& a, RunManifest& man) {
    wk::RegConfig rc{parse_alpha(a.alpha), a.order};
    if (a.noise == 0 && std::holds_alternative<wk::regdiff::Auto>(rc.alpha)) rc.alpha = wk::regdiff::None{};
    man.inputs.push_back(a.input);
    man.outputs.push_back(a.out);
    if (fs::path(a.input).extension() == ".skf") {
        // One series per node.
        wk::LoadedFrames lf = wk::load_frames(a.input);
        const wk::FrameSet& in = lf.frames;
        wk::FrameSet out(in.grid, in.dt, in.frame_count());
        std::size_t flagged = 0;
        for (std::size_t i = 0; i < in.grid.size(); ++i) {
            wk::NoisySignal sig{in.dt, std::vector<double>(in.frame_count()), a.noise};
            for (std::size_t n = 0; n < in.frame_count(); ++n) sig.values[n] = in.frame(n)[i];
            wk::DerivativeResult d = wk::derivative(sig, a.order, rc);
            for (std::size_t n = 0; n < in.frame_count(); ++n) out.frame(n)[i] = d.values[n];
            if (d.status != wk::AlphaChoiceResult::Status::Ok) ++flagged;
        }
        wk::save_frames(out, a.out);
        std::printf("differentiated %zu series (order %d); %zu without a bracketed alpha\n", in.grid.size(), a.order,
                    flagged);
        man.results = {{"series", in.grid.size()}, {"unbracketed", flagged}};
    } else {
        wk::csv::Series s = wk::csv::read_series(a.input);
        wk::NoisySignal sig{s.t[1] - s.t[0], s.value, a.noise};
        wk::DerivativeResult d = wk::derivative(sig, a.order, rc);
        std::string text = "t,value,one_sided\n";
        for (std::size_t i = 0; i < s.t.size(); ++i)
            text += wk::csv::detail::num(s.t[i]) + "," + wk::csv::detail::num(d.values[i]) + "," +
                    (d.one_sided[i] ? "1" : "0") + "\n";
        wk::csv::detail::write_text(a.out, text);
        const char* st = d.status == wk::AlphaChoiceResult::Status::Ok          ? "ok"
                         : d.status == wk::AlphaChoiceResult::Status::Saturated ? "saturated"
                                                                                 : "no-bracket";
        std::printf("order %d derivative of %zu samples, alpha %.6e (%s)\n", a.order, s.t.size(), d.alpha, st);
        if (d.status != wk::AlphaChoiceResult::Status::Ok)
            std::fprintf(stderr, "warning: discrepancy rule did not bracket the noise level (%s)\n", st);
        man.results = {{"alpha", d.alpha}, {"status", st}};
    }
    man.write(manifest_path(c, a.out));
    return 0;
}

struct SolveArgs {
    std::string source, formula = "v1", query, bank, out = "y.csv", medium;
    int stride = 1;
};

wk::QuerySet make_query(const wk::Scenario& s, const wk::Medium& m, const std::string& probes, int stride) {
    wk::QuerySet q = wk::region_query(s, m);
    if (!probes.empty()) q.points = wk::csv::read_points(probes);
    if (stride > 1) {
        std::vector<std::size_t> st;
        for (std::size_t n = 0; n < q.steps.size(); n += static_cast<std::size_t>(stride)) st.push_back(q.steps[n]);
        if (st.back() != q.steps.back()) st.push_back(q.steps.back());
        q.steps = st;
    }
    return q;
}

int cmd_solve(Common c, const SolveArgs& a, RunManifest& man) {
    if (!a.source.empty()) c.config = a.source;
    wk::Scenario s = load(c);
    wk::Formula f = a.formula == "v1" ? wk::Formula::V1 : a.formula == "v2" ? wk::Formula::V2 : wk::Formula::PF;
    if (s.sampled && f == wk::Formula::V1)
        std::fprintf(stderr, "note: sampled source; formula v2 needs only second derivatives of the noisy data and "
                             "is recommended\n");
    wk::Medium m = a.medium.empty() ? s.build() : wk::load_medium(a.medium);
    std::optional<wk::KernelBank> bank;
    if (!a.bank.empty()) bank.emplace(a.bank);
    std::size_t hits = 0;
    std::vector<wk::KernelTrace> traces = wk::scenario_traces(s, m, bank ? &*bank : nullptr, &hits);
    wk::QueryResult r = wk::run_formula(s, m, traces, make_query(s, m, a.query, a.stride), f);
    wk::csv::write_table(a.out, r);
    std::printf("%s: %zu points x %zu times, %zu kernels (%zu from bank) -> %s\n", a.formula.c_str(),
                r.query.points.size(), r.query.steps.size(), traces.size(), hits, a.out.c_str());
    man.config = wk::to_config(s);
    man.fingerprint = m.fingerprint();
    if (bank)
        for (const auto& tr : traces) man.bank_keys.push_back(fs::relative(bank->entry_path(m, tr.xi), a.bank).string());
    if (!a.query.empty()) man.inputs.push_back(a.query);
    man.outputs.push_back(a.out);
    man.results = {{"formula", a.formula}, {"points", r.query.points.size()}, {"times", r.query.steps.size()}};
    man.write(manifest_path(c, a.out));
    return 0;
}

int cmd_direct(Common c, const SolveArgs& a, RunManifest& man) {
    if (!a.source.empty()) c.config = a.source;
    wk::Scenario s = load(c);
    wk::Medium m = a.medium.empty() ? s.build() : wk::load_medium(a.medium);
    wk::FrameSet y = wk::run_direct(s, m);
    if (fs::path(a.out).extension() == ".skf") {
        wk::save_frames(y, a.out);
    } else {
        wk::QuerySet q = make_query(s, m, a.query, a.stride);
        wk::QueryResult r{q, y.dt, wk::sample_frames(y, q)};
        wk::csv::write_table(a.out, r);
    }
    std::printf("direct solve: %zu steps, dt=%g -> %s\n", y.steps(), y.dt, a.out.c_str());
    man.config = wk::to_config(s);
    man.fingerprint = m.fingerprint();
    man.outputs.push_back(a.out);
    man.write(manifest_path(c, a.out));
    return 0;
}

struct VerifyArgs {
    std::string identity, run, out;
    int levels = 3;
    double lo = 2.5, hi = 5.0;
};

int cmd_verify(const Common& c, const VerifyArgs& a, RunManifest& man) {
    if (a.identity != "2.20")
        throw wk::ConfigError("unknown identity '" + a.identity + "' (supported: 2.20, the operator identity)");
    wk::Scenario s = a.run.empty() ? load(c) : wkcli::scenario_of(wkcli::read_json(a.run), a.run);
    if (c.partitions > 0) s.solve.partitions = c.partitions;
    wk::ComparisonReport r = wk::identity_refinement(s, a.levels);
    print_report(r);
    std::vector<double> f = wk::reduction_factors(r);
    bool ok = true;
    for (double x : f) {
        std::printf("reduction factor %.3f\n", x);
        ok = ok && x >= a.lo && x <= a.hi;
    }
    json j = report_json(r);
    j["reduction_factors"] = f;
    j["accepted_range"] = {a.lo, a.hi};
    j["pass"] = ok;
    man.config = wk::to_config(s);
    if (!a.run.empty()) man.inputs.push_back(a.run);
    man.results = j;
    const fs::path out = a.out.empty() ? fs::path("verify.json") : fs::path(a.out);
    wk::csv::detail::write_text(out, j.dump(2) + "\n");
    man.outputs.push_back(out.string());
    man.write(manifest_path(c, out));
    if (!ok) throw wk::ValidationError("operator identity: reduction factors outside the accepted range");
    return 0;
}

struct CompareArgs {
    std::string a, b, out;
    double tol = -1;
};

int cmd_compare(const Common& c, const CompareArgs& a, RunManifest& man) {
    // The reference may hold extra rows (e.g. more recorded steps); every row of --a must appear in it.
    Table ta = sorted(read_result(a.a)), tb = sorted(read_result(a.b));
    std::vector<double> ref;
    ref.reserve(ta.values.size());
    auto key = [](const Table& t, std::size_t r) {
        return std::array<double, 4>{t.keys[4 * r], t.keys[4 * r + 1], t.keys[4 * r + 2], t.keys[4 * r + 3]};
    };
    for (std::size_t i = 0, j = 0; i < ta.values.size(); ++i) {
        while (j < tb.values.size() && key(tb, j) < key(ta, i)) ++j;
        if (j == tb.values.size() || key(tb, j) != key(ta, i))
            throw wk::ValidationError("shape mismatch: " + a.a + " has points or times missing from " + a.b +
                                      "; regrid explicitly first");
        ref.push_back(tb.values[j++]);
    }
    wk::ComparisonReport r = wk::compare_values(ta.values, ref);
    print_report(r);
    json j = report_json(r);
    man.inputs = {a.a, a.b};
    man.results = j;
    if (!a.out.empty()) {
        wk::csv::detail::write_text(a.out, j.dump(2) + "\n");
        man.outputs.push_back(a.out);
    }
    man.write(c.manifest.empty() ? (a.out.empty() ? fs::path("compare.manifest.json") : manifest_path(c, a.out))
                                 : fs::path(c.manifest));
    if (a.tol >= 0 && !(r.rel_l2 <= a.tol))
        throw wk::ValidationError("relative L2 discrepancy " + std::to_string(r.rel_l2) + " exceeds tolerance " +
                                  std::to_string(a.tol));
    return 0;
}

struct ExportArgs {
    std::string in, out;
    long step = -1;
};

int cmd_export(const Common& c, const ExportArgs& a, RunManifest& man) {
    // Payload kind sits right after the grid header.
    std::uint32_t kind = 0;
    {
        std::ifstream f(a.in, std::ios::binary);
        f.seekg(static_cast<std::streamoff>(wk::skf::kGridHeaderBytes - 4));
        if (!f.read(reinterpret_cast<char*>(&kind), sizeof kind))
            throw wk::ConfigError(a.in + ": truncated SKF1 header");
    }
    std::optional<wk::Medium> m;
    if (kind == static_cast<std::uint32_t>(wk::PayloadKind::Medium)) m = wk::load_medium(a.in);
    if (m) {
        std::string text = "x,y,z,c\n";
        const wk::Grid3& g = m->grid();
        for (std::size_t i = 0; i < g.size(); ++i) {
            wk::Vec3 x = g.node(g.unlinear(i));
            text += wk::csv::detail::num(x.x) + "," + wk::csv::detail::num(x.y) + "," + wk::csv::detail::num(x.z) +
                    "," + wk::csv::detail::num((*m)[i]) + "\n";
        }
        wk::csv::detail::write_text(a.out, text);
    } else {
        wk::LoadedFrames lf = wk::load_frames(a.in);
        if (a.step >= 0 && static_cast<std::size_t>(a.step) > lf.frames.steps())
            throw wk::ConfigError("step " + std::to_string(a.step) + " beyond the " +
                                  std::to_string(lf.frames.steps()) + " stored steps");
        wk::csv::write_frames(a.out, lf.frames, a.step);
    }
    std::printf("exported %s -> %s\n", a.in.c_str(), a.out.c_str());
    man.inputs.push_back(a.in);
    man.outputs.push_back(a.out);
    man.write(manifest_path(c, a.out));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heterogeneous acoustic Cauchy problem: kernel bank, representation formulas, direct oracle"};
    app.require_subcommand(1);
    app.set_version_flag("--version", WAVEKERNEL_VERSION);

    Common common;
    RunManifest man;
    for (int i = 0; i < argc; ++i) man.argv.emplace_back(argv[i]);

    auto* medium = app.add_subcommand("medium", "build a medium from a config and save it as SKF1");
    std::string medium_out = "medium.skf";
    add_common(medium, common);
    medium->add_option("--out", medium_out, "output file");

    KernelArgs ka;
    auto* kernel = app.add_subcommand("kernel", "solve regularized kernels for a block of source points");
    add_common(kernel, common);
    kernel->add_option("--medium", ka.medium, "medium file (default: from --config)");
    kernel->add_option("--xi-grid", ka.xi_grid, "NxNxN block of cell-centre source points (default: the quadrature nodes)");
    kernel->add_option("--xi-center", ka.xi_center, "x,y,z centre of the block");
    kernel->add_option("--xi-spacing", ka.spacing, "cells between source points (default: [quad] per_axis)")->check(CLI::PositiveNumber);
    kernel->add_option("--T", ka.T, "horizon");
    kernel->add_option("--cfl", ka.cfl, "CFL safety factor")->check(CLI::Range(1e-6, 1.0));
    kernel->add_option("--bank", ka.bank, "kernel bank directory")->required();

    DerivArgs da;
    auto* deriv = app.add_subcommand("deriv", "regularized time derivative of sampled data (CSV t,value or SKF1)");
    add_common(deriv, common, false);
    deriv->add_option("--input", da.input, "input series")->required()->check(CLI::ExistingFile);
    deriv->add_option("--order", da.order, "derivative order 1..4")->check(CLI::Range(1, 4));
    deriv->add_option("--noise", da.noise, "noise level delta")->check(CLI::NonNegativeNumber);
    deriv->add_option("--alpha", da.alpha, "auto | none | positive weight");
    deriv->add_option("--out", da.out, "output file")->required();

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "evaluate y from the kernel bank (formula v1, v2 or pf)");
    add_common(solve, common);
    solve->add_option("--source", sa.source, "scenario/source config (same as --config)");
    solve->add_option("--formula", sa.formula, "v1 | v2 | pf")->check(CLI::IsMember({"v1", "v2", "pf"}));
    solve->add_option("--query", sa.query, "CSV of x,y,z probe points (default: region nodes)");
    solve->add_option("--bank", sa.bank, "kernel bank directory (default: solve in memory)");
    solve->add_option("--medium", sa.medium, "medium file overriding the config");
    solve->add_option("--time-stride", sa.stride, "output every n-th step")->check(CLI::PositiveNumber);
    solve->add_option("--out", sa.out, "output CSV");

    SolveArgs xa;
    xa.out = "direct.csv";
    auto* direct = app.add_subcommand("direct", "direct leapfrog solve of the Cauchy problem");
    add_common(direct, common);
    direct->add_option("--source", xa.source, "scenario/source config (same as --config)");
    direct->add_option("--query", xa.query, "CSV of x,y,z probe points (default: region nodes)");
    direct->add_option("--medium", xa.medium, "medium file overriding the config");
    direct->add_option("--time-stride", xa.stride, "output every n-th step")->check(CLI::PositiveNumber);
    direct->add_option("--out", xa.out, "output .csv or .skf (frames on the region)");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "operator-identity refinement study on direct solutions");
    add_common(verify, common);
    verify->add_option("--identity", va.identity, "identity to check (2.20)")->required();
    verify->add_option("--run", va.run, "manifest whose config is used");
    verify->add_option("--levels", va.levels, "number of resolutions")->check(CLI::Range(2, 5));
    verify->add_option("--min-factor", va.lo, "smallest accepted error reduction per halving");
    verify->add_option("--max-factor", va.hi, "largest accepted error reduction per halving");
    verify->add_option("--out", va.out, "report JSON (default verify.json)");

    CompareArgs ca;
    auto* compare = app.add_subcommand("compare", "discrepancy of --a against the reference --b");
    add_common(compare, common, false);
    compare->add_option("--a", ca.a, "result file (.csv or .skf)")->required()->check(CLI::ExistingFile);
    compare->add_option("--b", ca.b, "reference file (.csv or .skf)")->required()->check(CLI::ExistingFile);
    compare->add_option("--tol", ca.tol, "fail (exit 4) above this relative L2 discrepancy");
    compare->add_option("--out", ca.out, "report JSON");

    ExportArgs ea;
    auto* exp = app.add_subcommand("export", "convert an SKF1 medium or frame set to CSV");
    add_common(exp, common, false);
    exp->add_option("--in", ea.in, "SKF1 file")->required()->check(CLI::ExistingFile);
    exp->add_option("--out", ea.out, "CSV file")->required();
    exp->add_option("--step", ea.step, "only this step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(wk::ErrorKind::Config);
    }

    try {
        if (*medium) return (man.command = "medium", cmd_medium(common, medium_out, man));
        if (*kernel) return (man.command = "kernel", cmd_kernel(common, ka, man));
        if (*deriv) return (man.command = "deriv", cmd_deriv(common, da, man));
        if (*solve) return (man.command = "solve", cmd_solve(common, sa, man));
        if (*direct) return (man.command = "direct", cmd_direct(common, xa, man));
        if (*verify) return (man.command = "verify", cmd_verify(common, va, man));
        if (*compare) return (man.command = "compare", cmd_compare(common, ca, man));
        if (*exp) return (man.command = "export", cmd_export(common, ea, man));
    } catch (const wk::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const fs::filesystem_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(wk::ErrorKind::Config);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(wk::ErrorKind::Numeric);
    }
    return 0;
}
