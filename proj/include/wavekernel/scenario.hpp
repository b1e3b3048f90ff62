#pragma once
/**
 * @file scenario.hpp
 * @brief A complete run description: grid, medium, source, horizon, quadrature.
 *
 * Scenarios are read from config files (sections [grid], [medium], [solve],
 * [source], [quad], [regdiff]) and written back as the same text, which is what
 * run manifests store.
 */

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "error.hpp"
#include "fdtd.hpp"
#include "grid.hpp"
#include "medium.hpp"
#include "regdiff.hpp"
#include "representation.hpp"
#include "skf_io.hpp"
#include "solve_config.hpp"
#include "source.hpp"

namespace wk {

struct Scenario {
    // [grid]: base grid before causal padding
    std::array<int, 3> n{48, 48, 48};
    double h = 1.0 / 16;
    Vec3 center{};
    bool auto_pad = true;

    MediumProfile medium = MediumProfile::bump({0, 0, 0}, 0.4, 0.3);

    // [solve]
    double T = 2.0;
    SolveConfig solve{};
    Box region = Box::of({-0.25, -0.5, -0.5}, {0.75, 0.5, 0.5});
    int jobs = 1;

    // [source]
    AnalyticSource source{SpatialBump{{-0.75, 0, 0}, 0.25, 5}, TimeProfile::exp(8.0, 8), 1.0};
    bool sampled = false;
    double noise = 0.0;
    std::uint64_t seed = 1;

    // [quad]
    int per_axis = 2;

    // [regdiff]
    AlphaChoice alpha = regdiff::Auto{};

    Grid3 base_grid() const {
        double hx = 0.5 * h * (n[0] - 1), hy = 0.5 * h * (n[1] - 1), hz = 0.5 * h * (n[2] - 1);
        return Grid3(n[0], n[1], n[2], h, center - Vec3{hx, hy, hz});
    }

    /// Lower bound of c implied by the profile (exact for a single bump).
    double c0_bound() const {
        double lo = 0;
        for (const Bump& b : medium.bumps) lo += std::min(0.0, b.amplitude);
        return 1.0 + lo;
    }

    Box medium_box() const {
        Box b;
        for (const Bump& m : medium.bumps) b = b.united(Box::around(m.center, m.radius));
        return b;
    }

    /// Base grid extended so that boundary reflections cannot reach the region before T.
    Grid3 grid() const {
        Grid3 base = base_grid();
        if (!auto_pad) return base;
        return base.padded(required_padding(medium_box().united(source.support()), region, base, T, c0_bound()));
    }

    Medium build() const {
        if (medium.kind == MediumProfile::Kind::FromFile) return load_medium(medium.path);
        return build_medium(medium, grid());
    }

    SolveConfig solve_config() const {
        SolveConfig c = solve;
        c.record = region;
        return c;
    }

    QuadratureSpec quadrature(const Grid3& g) const { return QuadratureSpec::aligned(g, source.support(), per_axis); }

    RegConfig reg(int order) const { return RegConfig{alpha, order}; }
};

/// The fixed acceptance scenario.
inline Scenario standard_scenario() { return Scenario{}; }

/// Free-space variant of the acceptance scenario.
inline Scenario homogeneous_scenario() {
    Scenario s;
    s.medium = MediumProfile::constant();
    return s;
}

/// Noisy samples f(xi_j, m dt) + N(0, noise^2), one series per quadrature node.
inline SampledSource sample_source(const AnalyticSource& f, const QuadratureSpec& q, double dt, std::size_t steps,
                                   double noise, std::uint64_t seed) {
    SampledSource s;
    s.dt = dt;
    s.noise = noise;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    s.series.assign(q.size(), std::vector<double>(steps + 1));
    for (std::size_t j = 0; j < q.size(); ++j)
        for (std::size_t m = 0; m <= steps; ++m)
            s.series[j][m] = f.value(q.node(j), static_cast<double>(m) * dt) + (noise > 0 ? noise * gauss(rng) : 0.0);
    return s;
}

inline SourceSpec source_spec(const Scenario& s, const QuadratureSpec& q, double dt, std::size_t steps) {
    if (!s.sampled) return s.source;
    return sample_source(s.source, q, dt, steps, s.noise, s.seed);
}

namespace detail {

/// Shortest text that parses back to the same double.
inline std::string num(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline Box read_box(const config::Section& sec, const std::string& lo, const std::string& hi, Box fallback) {
    if (!sec.has(lo) && !sec.has(hi)) return fallback;
    Box b = Box::of(sec.vec3(lo), sec.vec3(hi));
    for (int a = 0; a < 3; ++a)
        if (!(b.lo[a] < b.hi[a])) config::Section::fail(sec.get(hi).line, "[", sec.name, "] ", hi, " must exceed ", lo);
    return b;
}

}  // namespace detail

inline Scenario scenario_from(const config::Document& doc) {
    using config::Section;
    doc.check_sections({"grid", "medium", "solve", "source", "quad", "regdiff"});
    Scenario s;

    const Section& g = doc.section("grid");
    if (g.has("n")) {
        const config::Value& v = g.get("n");
        if (v.is_number()) {
            int n = g.integer("n");
            s.n = {n, n, n};
        } else {
            std::vector<double> d = g.numbers(v, "n");
            if (d.size() != 3) Section::fail(v.line, "[grid] n: expected a count or 3 counts");
            for (int a = 0; a < 3; ++a) {
                if (d[a] != std::floor(d[a])) Section::fail(v.line, "[grid] n: counts must be integers");
                s.n[a] = static_cast<int>(d[a]);
            }
        }
        for (int c : s.n)
            if (c < 3) Section::fail(v.line, "[grid] n: need at least 3 nodes per axis, got ", c);
    }
    s.h = g.number("h", s.h);
    if (!(s.h > 0)) Section::fail(g.get("h").line, "[grid] h must be positive");
    s.center = g.vec3("center", s.center);
    std::string pad = g.string("padding", "auto");
    if (pad != "auto" && pad != "none") Section::fail(g.get("padding").line, "[grid] padding must be \"auto\" or \"none\"");
    s.auto_pad = pad == "auto";

    const Section& m = doc.section("medium");
    std::string kind = m.string("kind", "bump");
    if (kind == "constant") {
        s.medium = MediumProfile::constant();
    } else if (kind == "bump") {
        s.medium = MediumProfile::bump(m.vec3("center", {0, 0, 0}), m.number("radius", 0.4), m.number("amplitude", 0.3));
    } else if (kind == "bumps") {
        const config::Value& v = m.get("bumps");
        if (!v.is_array()) Section::fail(v.line, "[medium] bumps: expected [[x, y, z, radius, amplitude], ...]");
        std::vector<Bump> bumps;
        for (const config::Value& e : std::get<config::Array>(v.data)) {
            std::vector<double> d = m.numbers(e, "bumps");
            if (d.size() != 5) Section::fail(e.line, "[medium] bumps: each entry needs 5 numbers");
            bumps.push_back(Bump{{d[0], d[1], d[2]}, d[3], d[4]});
        }
        if (bumps.empty()) Section::fail(v.line, "[medium] bumps: empty list");
        s.medium = MediumProfile::sum_of_bumps(std::move(bumps));
    } else if (kind == "file") {
        s.medium = MediumProfile{MediumProfile::Kind::FromFile, {}, m.string("path")};
    } else {
        Section::fail(m.has("kind") ? m.get("kind").line : m.line, "[medium] unknown kind '", kind, "'");
    }

    const Section& so = doc.section("solve");
    s.T = so.number("T", s.T);
    if (!(s.T >= 0)) Section::fail(so.get("T").line, "[solve] T must be >= 0");
    s.solve.cfl = so.number("cfl", s.solve.cfl);
    if (!(s.solve.cfl > 0 && s.solve.cfl <= 1)) Section::fail(so.get("cfl").line, "[solve] cfl must be in (0, 1]");
    s.solve.partitions = so.integer("partitions", s.solve.partitions);
    s.jobs = so.integer("jobs", s.jobs);
    if (s.solve.partitions < 1 || s.jobs < 1) Section::fail(so.line, "[solve] partitions and jobs must be >= 1");
    s.region = detail::read_box(so, "region_lo", "region_hi", s.region);
    s.solve.sponge.width = so.integer("sponge_width", 0);
    s.solve.sponge.strength = so.number("sponge_strength", 0.0);
    s.solve.cap_radius = so.boolean("cap_radius", false);

    const Section& sr = doc.section("source");
    std::string skind = sr.string("kind", "analytic");
    if (skind != "analytic" && skind != "sampled")
        Section::fail(sr.get("kind").line, "[source] kind must be \"analytic\" or \"sampled\"");
    s.sampled = skind == "sampled";
    s.source.phi.center = sr.vec3("center", s.source.phi.center);
    s.source.phi.radius = sr.number("radius", s.source.phi.radius);
    s.source.phi.power = sr.integer("power", s.source.phi.power);
    if (!(s.source.phi.radius > 0)) Section::fail(sr.get("radius").line, "[source] radius must be positive");
    if (s.source.phi.power < 4) Section::fail(sr.get("power").line, "[source] power must be >= 4");
    std::string prof = sr.string("profile", "exp");
    int tp = sr.integer("time_power", 8);
    if (prof == "exp")
        s.source.psi = TimeProfile::exp(sr.number("beta", 8.0), tp);
    else if (prof == "window")
        s.source.psi = TimeProfile::window(sr.number("duration", 1.0), tp);
    else
        Section::fail(sr.get("profile").line, "[source] profile must be \"exp\" or \"window\"");
    try {
        s.source.psi.validate();
    } catch (const ConfigError& e) {
        Section::fail(sr.has("time_power") ? sr.get("time_power").line : sr.line, e.what());
    }
    s.source.amplitude = sr.number("amplitude", 1.0);
    s.noise = sr.number("noise", 0.0);
    if (!(s.noise >= 0)) Section::fail(sr.get("noise").line, "[source] noise must be >= 0");
    s.seed = static_cast<std::uint64_t>(sr.integer("seed", 1));

    const Section& q = doc.section("quad");
    s.per_axis = q.integer("per_axis", s.per_axis);
    if (s.per_axis < 1) Section::fail(q.get("per_axis").line, "[quad] per_axis must be >= 1");

    const Section& r = doc.section("regdiff");
    if (r.has("alpha")) {
        const config::Value& v = r.get("alpha");
        if (v.is_number()) {
            double a = std::get<double>(v.data);
            if (!(a > 0)) Section::fail(v.line, "[regdiff] alpha must be positive");
            s.alpha = regdiff::Fixed{a};
        } else if (v.is_string() && std::get<std::string>(v.data) == "auto") {
            s.alpha = regdiff::Auto{};
        } else if (v.is_string() && std::get<std::string>(v.data) == "none") {
            s.alpha = regdiff::None{};
        } else {
            Section::fail(v.line, "[regdiff] alpha must be a positive number, \"auto\" or \"none\"");
        }
    }
    if (s.sampled && std::holds_alternative<regdiff::Auto>(s.alpha) && s.noise == 0.0)
        s.alpha = regdiff::None{};

    doc.check_all_used();
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    config::Document doc = config::parse_file(path);
    try {
        return scenario_from(doc);
    } catch (const ConfigError& e) {
        throw config::located(path, e);
    }
}

/// Config text that reads back into the same scenario.
inline std::string to_config(const Scenario& s) {
    using detail::num;
    std::ostringstream o;
    auto v3 = [](Vec3 v) {
        std::ostringstream t;
        t << "[" << num(v.x) << ", " << num(v.y) << ", " << num(v.z) << "]";
        return t.str();
    };
    o << "[grid]\nn = [" << s.n[0] << ", " << s.n[1] << ", " << s.n[2] << "]\nh = " << num(s.h)
      << "\ncenter = " << v3(s.center) << "\npadding = \"" << (s.auto_pad ? "auto" : "none") << "\"\n\n";
    o << "[medium]\n";
    switch (s.medium.kind) {
        case MediumProfile::Kind::Constant: o << "kind = \"constant\"\n"; break;
        case MediumProfile::Kind::RadialBump: {
            const Bump& b = s.medium.bumps.front();
            o << "kind = \"bump\"\ncenter = " << v3(b.center) << "\nradius = " << num(b.radius)
              << "\namplitude = " << num(b.amplitude) << "\n";
            break;
        }
        case MediumProfile::Kind::SumOfBumps:
            o << "kind = \"bumps\"\nbumps = [";
            for (std::size_t i = 0; i < s.medium.bumps.size(); ++i) {
                const Bump& b = s.medium.bumps[i];
                o << (i ? ", " : "") << "[" << num(b.center.x) << ", " << num(b.center.y) << ", " << num(b.center.z) << ", "
                  << num(b.radius) << ", " << num(b.amplitude) << "]";
            }
            o << "]\n";
            break;
        case MediumProfile::Kind::FromFile: o << "kind = \"file\"\npath = \"" << s.medium.path << "\"\n"; break;
    }
    o << "\n[solve]\nT = " << num(s.T) << "\ncfl = " << num(s.solve.cfl) << "\npartitions = " << s.solve.partitions
      << "\njobs = " << s.jobs << "\nregion_lo = " << v3(s.region.lo) << "\nregion_hi = " << v3(s.region.hi)
      << "\nsponge_width = " << s.solve.sponge.width << "\nsponge_strength = " << num(s.solve.sponge.strength)
      << "\ncap_radius = " << (s.solve.cap_radius ? "true" : "false") << "\n\n";
    const AnalyticSource& f = s.source;
    o << "[source]\nkind = \"" << (s.sampled ? "sampled" : "analytic") << "\"\ncenter = " << v3(f.phi.center)
      << "\nradius = " << num(f.phi.radius) << "\npower = " << f.phi.power << "\n";
    if (f.psi.kind == TimeProfile::Kind::Exp)
        o << "profile = \"exp\"\nbeta = " << num(f.psi.beta) << "\n";
    else
        o << "profile = \"window\"\nduration = " << num(f.psi.duration) << "\n";
    o << "time_power = " << f.psi.power << "\namplitude = " << num(f.amplitude) << "\nnoise = " << num(s.noise)
      << "\nseed = " << s.seed << "\n\n";
    o << "[quad]\nper_axis = " << s.per_axis << "\n\n[regdiff]\n";
    if (auto* a = std::get_if<regdiff::Fixed>(&s.alpha))
        o << "alpha = " << num(a->alpha) << "\n";
    else
        o << "alpha = \"" << (std::holds_alternative<regdiff::Auto>(s.alpha) ? "auto" : "none") << "\"\n";
    return o.str();
}

}  // namespace wk
