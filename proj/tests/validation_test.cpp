#include <gtest/gtest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "wavekernel/medium.hpp"
#include "wavekernel/validation.hpp"

using namespace wk;

namespace {

AnalyticSource centred_source(double radius = 0.25) {
    return AnalyticSource{SpatialBump{{0, 0, 0}, radius, 5}, TimeProfile::exp(8.0, 8), 1.0};
}

SolveConfig loose() {
    SolveConfig c;
    c.enforce_padding = false;
    return c;
}

}  // namespace

TEST(Compare, IdenticalAndScaledInputs) {
    std::vector<double> b{1.0, -2.0, 0.5, 3.0};
    std::vector<double> a = b;
    ComparisonReport r = compare_values(a, b);
    EXPECT_EQ(r.rel_l2, 0.0);
    EXPECT_EQ(r.max_abs, 0.0);
    for (double& v : a) v *= 2;
    r = compare_values(a, b);
    EXPECT_NEAR(r.rel_l2, 1.0, 1e-15);
    EXPECT_NEAR(r.rel_max, 1.0, 1e-15);
    EXPECT_EQ(r.count, 4u);
    EXPECT_EQ(compare_values(a, b).max_abs, compare_values(b, a).max_abs);
}

TEST(Compare, ShapeMismatchIsValidationError) {
    std::vector<double> a(3), b(4);
    EXPECT_THROW(compare_values(a, b), ValidationError);
    FrameSet x(Grid3::centered(4, 0.1), 0.01, 3), y(Grid3::centered(5, 0.1), 0.01, 3);
    EXPECT_THROW(compare_fields(x, y), ValidationError);
    FrameSet z(Grid3::centered(4, 0.1), 0.02, 3);
    EXPECT_THROW(compare_fields(x, z), ValidationError);
}

TEST(Compare, ZeroReferenceUsesFloor) {
    std::vector<double> a{0.0, 0.0}, b{0.0, 0.0};
    EXPECT_EQ(compare_values(a, b).rel_l2, 0.0);
}

TEST(Orders, NeedThreeLevels) {
    std::vector<double> e2{1.0, 0.25};
    EXPECT_TRUE(observed_orders(e2).empty());
    std::vector<double> e3{1.0, 0.25, 0.0625};
    auto p = observed_orders(e3);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_DOUBLE_EQ(p[0], 2.0);
    EXPECT_DOUBLE_EQ(p[1], 2.0);
}

TEST(Direct, ZeroSourceGivesZero) {
    Grid3 g = Grid3::centered(16, 0.0625);
    Medium m = build_medium(MediumProfile::bump({0, 0, 0}, 0.2, 0.5), g);
    AnalyticSource f = centred_source();
    f.amplitude = 0;
    FrameSet y = direct_solve(m, f, 0.5, loose());
    for (double v : y.data) EXPECT_EQ(v, 0.0);
}

TEST(Direct, ManufacturedSolutionSecondOrder) {
    oracle::Manufactured mf;
    mf.p = 5;
    mf.bump = SpatialBump{{0.05, 0, -0.05}, 0.45, 5};
    const double T = 0.6;
    double err[3];
    for (int l = 0; l < 3; ++l) {
        double h = 0.1 / (1 << l);
        Grid3 g = Grid3::centered(static_cast<int>(std::lround(1.4 / h)) + 1, h);
        Medium m = build_medium(MediumProfile::bump({0, 0, 0}, 0.3, 0.6), g);
        NodeSource src{g.all(), [&](Index3 p, double t) { return mf.rhs(m.at(p), g.node(p), t); }};
        FrameSet y = direct_solve_with(m, src, T, loose(), mf.bump.support());
        std::size_t n = steps_for(T, y.dt);
        double e = 0;
        auto fr = y.frame(n);
        for (std::size_t i = 0; i < g.size(); ++i)
            e = std::max(e, std::abs(fr[i] - mf.value(g.node(g.unlinear(i)), static_cast<double>(n) * y.dt)));
        err[l] = e;
    }
    auto p = observed_orders(std::vector<double>(err, err + 3));
    for (double o : p) {
        EXPECT_GE(o, 1.7);
        EXPECT_LE(o, 2.3);
    }
}

TEST(Direct, HomogeneousMatchesRetardedPotential) {
    Grid3 g = Grid3::centered(49, 1.0 / 16);
    Medium m = build_medium(MediumProfile::constant(), g);
    AnalyticSource f = centred_source();
    const double T = 1.5;
    FrameSet y = direct_solve(m, f, T, loose());
    std::vector<double> got, want;
    for (Vec3 x : {Vec3{0.5, 0, 0}, Vec3{0.25, 0.25, 0.125}, Vec3{0, 0, -0.625}, Vec3{0.125, 0, 0}})
        for (std::size_t n = 0; n <= steps_for(T, y.dt); ++n) {
            got.push_back(y.frame(n)[g.linear(g.nearest(x))]);
            want.push_back(oracle::retarded_potential(f, x, static_cast<double>(n) * y.dt));
        }
    EXPECT_LE(compare_values(got, want).rel_l2, 0.02);
}

TEST(Identity, StrideOneIsExactForLeapfrogOutput) {
    Grid3 g = Grid3::centered(24, 1.0 / 16);
    Medium m = build_medium(MediumProfile::bump({0.1, 0, 0}, 0.3, 0.5), g);
    AnalyticSource f = centred_source();
    FrameSet y = direct_solve(m, f, 1.0, loose());
    ComparisonReport r = verify_identity_220(y, m, f, 1, 1);
    EXPECT_LE(r.rel_l2, 1e-10);
}

TEST(Identity, StrideTwoConvergesUnderRefinement) {
    double e[2];
    for (int l = 0; l < 2; ++l) {
        double h = 1.0 / (16 << l);
        Grid3 g = Grid3::centered(static_cast<int>(std::lround(1.5 / h)) + 1, h);
        Medium m = build_medium(MediumProfile::bump({0.1, 0, 0}, 0.3, 0.5), g);
        AnalyticSource f = centred_source();
        SolveConfig cfg = loose();
        cfg.record = Box::around({0, 0, 0}, 0.4);
        FrameSet y = direct_solve(m, f, 1.0, cfg);
        e[l] = verify_identity_220(y, m, f, 2, 0, steps_for(1.0, y.dt)).rel_l2;
    }
    EXPECT_GE(e[0] / e[1], 2.5);
    EXPECT_LE(e[0] / e[1], 5.0);
}

TEST(Identity, ZeroSourceAndMisalignedFrames) {
    Grid3 g = Grid3::centered(16, 0.0625);
    Medium m = build_medium(MediumProfile::constant(), g);
    AnalyticSource f = centred_source();
    f.amplitude = 0;
    FrameSet y = direct_solve(m, f, 0.5, loose());
    EXPECT_EQ(verify_identity_220(y, m, f).rel_l2, 0.0);
    FrameSet shifted(Grid3(8, 8, 8, 0.0625, g.origin() + Vec3{0.01, 0, 0}), y.dt, 6);
    EXPECT_THROW(verify_identity_220(shifted, m, f), ValidationError);
}
