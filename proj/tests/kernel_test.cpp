#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "wavekernel/kernel.hpp"
#include "wavekernel/medium.hpp"

namespace fs = std::filesystem;
using namespace wk;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / "wavekernel_kernel_test" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

SolveConfig loose() {
    SolveConfig c;
    c.enforce_padding = false;
    return c;
}

double max_abs(std::span<const double> v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST(Kernel, HomogeneousMediumGivesZeroCorrection) {
    Grid3 g = Grid3::centered(16, 0.125);
    Medium m = build_medium(MediumProfile::constant(), g);
    Vec3 xi = g.node(7, 8, 6) + Vec3{0.0625, 0.0625, 0.0625};
    KernelTrace tr = solve_wtilde(m, xi, 1.0, loose());
    for (double v : tr.frames.data) ASSERT_EQ(v, 0.0);
    for (std::size_t n : {std::size_t{0}, tr.steps() / 2, tr.steps()})
        for (std::size_t i = 0; i < g.size(); i += 37) {
            Index3 p = g.unlinear(i);
            EXPECT_EQ(assemble_w(tr, p, n), eval_tail(xi, 0.0, g.node(p), static_cast<double>(n) * tr.dt()));
        }
}

TEST(Kernel, CausalBeforeReachingHeterogeneity) {
    Grid3 g = Grid3::centered(32, 0.0625);
    Medium m = build_medium(MediumProfile::bump({0.2, 0, 0}, 0.3, 0.5), g);
    Vec3 xi = g.node(6, 15, 15) + Vec3{0.03125, 0.03125, 0.03125};
    KernelTrace tr = solve_wtilde(m, xi, 1.5, loose());
    const double d = distance(xi, m.omega_box());
    ASSERT_GT(d, 0.3);
    bool any = false;
    for (std::size_t n = 0; n <= tr.steps(); ++n) {
        double t = static_cast<double>(n) * tr.dt();
        double mx = max_abs(tr.frames.frame(n));
        if (t <= d) ASSERT_EQ(mx, 0.0) << "step " << n;
        any = any || mx > 0;
    }
    EXPECT_TRUE(any);
}

TEST(Kernel, LeapfrogIdentityHoldsOnTrace) {
    Grid3 g = Grid3::centered(24, 0.0625);
    Medium m = build_medium(MediumProfile::bump({0, 0, 0}, 0.3, 0.6), g);
    Vec3 xi = g.node(4, 11, 12) + Vec3{0.03125, 0.03125, 0.03125};
    KernelTrace tr = solve_wtilde(m, xi, 1.0, loose());
    SourceG src{&m, xi, 0.0, tr.singularity};
    double scale = 0, err = 0;
    for (std::size_t n = 1; n < tr.steps(); ++n) {
        Field r = apply_operator(tr.frames.frame(n - 1), tr.frames.frame(n), tr.frames.frame(n + 1), m, tr.dt());
        for (int k = 1; k < g.nz() - 1; ++k)
            for (int j = 1; j < g.ny() - 1; ++j)
                for (int i = 1; i < g.nx() - 1; ++i) {
                    double want = eval_source_g(src, {i, j, k}, static_cast<double>(n) * tr.dt());
                    scale = std::max(scale, std::abs(want));
                    err = std::max(err, std::abs(r[g.linear(i, j, k)] - want));
                }
    }
    EXPECT_GT(scale, 0.0);
    EXPECT_LE(err, 1e-9 * scale);
}

TEST(Kernel, SelfConvergenceSecondOrder) {
    // Nested grids on [-1, 1]; xi at a centre of the coarsest cells, outside Omega.
    const Vec3 xi{0.8125, 0.0625, 0.0625};
    const double T = 1.0;
    std::vector<FrameSet> sol;
    std::vector<std::size_t> last;
    for (int l = 0; l < 3; ++l) {
        double h = 0.125 / (1 << l);
        Grid3 g = Grid3::centered(static_cast<int>(std::lround(2.0 / h)) + 1, h);
        Medium m = build_medium(MediumProfile::bump({0, 0, 0}, 0.5, 0.5), g);
        SolveConfig cfg = loose();
        cfg.record = Box::around({0, 0, 0}, 0.5);
        KernelTrace tr = solve_wtilde(m, xi, T, cfg);
        last.push_back(steps_for(T, tr.dt()));
        sol.push_back(std::move(tr.frames));
    }
    const std::size_t nc = last[0] - 1;
    ASSERT_LE(2 * nc, last[1]);
    ASSERT_LE(4 * nc, last[2]);
    // differences on the coarse nodes at t = nc dt
    double d[2] = {0, 0};
    const Grid3& gc = sol[0].grid;
    for (std::size_t i = 0; i < gc.size(); ++i) {
        Vec3 x = gc.node(gc.unlinear(i));
        double u[3];
        for (int l = 0; l < 3; ++l) {
            const Grid3& gl = sol[static_cast<std::size_t>(l)].grid;
            u[l] = sol[static_cast<std::size_t>(l)].frame(nc << l)[gl.linear(gl.nearest(x))];
        }
        d[0] = std::max(d[0], std::abs(u[0] - u[1]));
        d[1] = std::max(d[1], std::abs(u[1] - u[2]));
    }
    EXPECT_GT(d[1], 0.0);
    EXPECT_GE(d[0] / d[1], 3.0);
    EXPECT_LE(d[0] / d[1], 5.0);
}

TEST(Kernel, DelayedSourceShiftsTrace) {
    Grid3 g = Grid3::centered(20, 0.0625);
    Medium m = build_medium(MediumProfile::bump({0, 0, 0}, 0.25, 0.4), g);
    Vec3 xi = g.node(3, 9, 10) + Vec3{0.03125, 0.03125, 0.03125};
    SolveConfig cfg = loose();
    KernelTrace base = solve_wtilde(m, xi, 1.0, cfg);
    const std::size_t shift = 5;
    cfg.source_delay = static_cast<double>(shift) * base.dt();
    KernelTrace late = solve_wtilde(m, xi, 1.0, cfg);
    const double scale = max_abs(base.frames.data);
    ASSERT_GT(scale, 0.0);
    for (std::size_t n = 0; n <= late.steps(); ++n) {
        auto a = late.frames.frame(n);
        if (n < shift) {
            EXPECT_EQ(max_abs(a), 0.0);
            continue;
        }
        auto b = base.frames.frame(n - shift);
        for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-12 * scale) << "step " << n;
    }
}

TEST(Kernel, CorrectionScalesWithAmplitude) {
    Grid3 g = Grid3::centered(24, 0.0625);
    Vec3 xi = g.node(3, 11, 12) + Vec3{0.03125, 0.03125, 0.03125};
    double norm[3];
    const double amps[3] = {0.4, 0.2, 0.1};
    for (int a = 0; a < 3; ++a) {
        Medium m = build_medium(MediumProfile::bump({0.1, 0, 0}, 0.35, amps[a]), g);
        norm[a] = max_abs(solve_wtilde(m, xi, 1.2, loose()).frames.data);
    }
    EXPECT_NEAR(norm[0] / norm[1], 2.0, 0.5);
    EXPECT_NEAR(norm[1] / norm[2], 2.0, 0.5);
}

TEST(Kernel, SingularSourcePointRejectedUnlessCapped) {
    Grid3 g = Grid3::centered(20, 0.0625);
    Medium m = build_medium(MediumProfile::bump({0, 0, 0}, 0.3, 0.4), g);
    Vec3 on_node = g.node(g.nearest({0, 0, 0}));
    EXPECT_THROW(solve_wtilde(m, on_node, 0.3, loose()), NumericError);
    SolveConfig cfg = loose();
    cfg.cap_radius = true;
    EXPECT_NO_THROW(solve_wtilde(m, on_node, 0.3, cfg));
}

TEST(Kernel, PaddingEnforcedForRecordedRegion) {
    Grid3 g = Grid3::centered(16, 0.0625);
    Medium m = build_medium(MediumProfile::bump({0, 0, 0}, 0.2, 0.4), g);
    SolveConfig cfg;
    cfg.record = Box::around({0, 0, 0}, 0.2);
    Vec3 xi = g.node(3, 7, 8) + Vec3{0.03125, 0.03125, 0.03125};
    EXPECT_THROW(solve_wtilde(m, xi, 2.0, cfg), ConfigError);
}

TEST(Bank, HitIsBitwiseIdentical) {
    auto root = fresh_dir("hit");
    Grid3 g = Grid3::centered(16, 0.125);
    Medium m = build_medium(MediumProfile::bump({0, 0, 0}, 0.4, 0.5), g);
    KernelBank bank(root);
    std::vector<Vec3> xis{g.node(1, 7, 7) + Vec3{0.0625, 0.0625, 0.0625}, g.node(12, 4, 9) + Vec3{0.0625, 0.0625, 0.0625}};
    BankResult first = bank_get_or_solve(bank, m, xis, 1.0, loose(), 2);
    EXPECT_EQ(first.misses, 2u);
    EXPECT_EQ(first.hits, 0u);
    BankResult second = bank_get_or_solve(bank, m, xis, 1.0, loose(), 2);
    EXPECT_EQ(second.hits, 2u);
    EXPECT_EQ(second.misses, 0u);
    for (std::size_t j = 0; j < xis.size(); ++j) {
        const auto& a = first.traces[j].frames.data;
        const auto& b = second.traces[j].frames.data;
        ASSERT_EQ(a.size(), b.size());
        EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)), 0);
        EXPECT_EQ(second.traces[j].record, first.traces[j].record);
    }
    // shorter horizon is served by the same entry
    EXPECT_EQ(bank_get_or_solve(bank, m, xis, 0.5, loose()).hits, 2u);
}

TEST(Bank, KeysSeparateMediaAndCells) {
    Grid3 g = Grid3::centered(16, 0.125);
    Medium a = build_medium(MediumProfile::bump({0, 0, 0}, 0.4, 0.5), g);
    Medium b = build_medium(MediumProfile::bump({0, 0, 0}, 0.4, 0.5000001), g);
    KernelBank bank("/nonexistent");
    Vec3 xi = g.node(2, 3, 4) + Vec3{0.0625, 0.0625, 0.0625};
    EXPECT_NE(bank.entry_path(a, xi), bank.entry_path(b, xi));
    EXPECT_EQ(bank.entry_path(a, xi).filename().string(), "2-3-4.skf");
    Vec3 off = xi + Vec3{0.01, 0, 0};
    EXPECT_NE(bank.entry_path(a, off), bank.entry_path(a, xi));
}

TEST(Bank, CorruptedEntryFailsChecksum) {
    auto root = fresh_dir("corrupt");
    Grid3 g = Grid3::centered(12, 0.125);
    Medium m = build_medium(MediumProfile::bump({0, 0, 0}, 0.3, 0.5), g);
    KernelBank bank(root);
    Vec3 xi = g.node(1, 5, 5) + Vec3{0.0625, 0.0625, 0.0625};
    bank_get_or_solve(bank, m, {xi}, 0.8, loose());
    auto p = bank.entry_path(m, xi);
    {
        std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(200);
        char c = 0x5a;
        f.write(&c, 1);
    }
    try {
        bank.load(m, xi, 0.8, loose());
        FAIL() << "corrupted entry accepted";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("checksum"), std::string::npos) << e.what();
    }
}

TEST(Bank, StaleEntryIsReported) {
    auto root = fresh_dir("stale");
    Grid3 g = Grid3::centered(12, 0.125);
    Medium m = build_medium(MediumProfile::bump({0, 0, 0}, 0.3, 0.5), g);
    KernelBank bank(root);
    Vec3 xi = g.node(1, 5, 5) + Vec3{0.0625, 0.0625, 0.0625};
    bank_get_or_solve(bank, m, {xi}, 0.5, loose());
    try {
        bank.load(m, xi, 1.5, loose());
        FAIL() << "short horizon accepted";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("stale"), std::string::npos) << e.what();
    }
    // an entry copied under another medium's fingerprint
    Medium other = build_medium(MediumProfile::bump({0, 0, 0}, 0.3, 0.6), g);
    fs::create_directories(bank.entry_path(other, xi).parent_path());
    fs::copy_file(bank.entry_path(m, xi), bank.entry_path(other, xi));
    EXPECT_THROW(bank.load(other, xi, 0.5, loose()), ConfigError);
}
