#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "kgfield/errors.hpp"
#include "kgfield/evolution.hpp"

using namespace kgfield;
constexpr double two_pi = 2 * std::numbers::pi;

namespace
{
LatticeField cosine_wave(SpatialGrid const& g, Mass m, double k, double t)
{
    // phi = cos(kx - wt), pi = w sin(kx - wt)
    double w = m.omega(k * k);
    RealArray phi(g.size()), pi(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        double ph = k * g.position(i)[0] - w * t;
        phi[i] = std::cos(ph);
        pi[i] = w * std::sin(ph);
    }
    return LatticeField(g, m, t, phi, pi);
}

double max_diff(LatticeField const& a, LatticeField const& b)
{
    double e = 0;
    for (std::size_t i = 0; i < a.phi.size(); ++i)
    {
        e = std::max(e, std::abs(a.phi[i] - b.phi[i]));
        e = std::max(e, std::abs(a.pi[i] - b.pi[i]));
    }
    return e;
}
}  // namespace

TEST(EvolveExact, MatchesAnalyticPlaneWave)
{
    auto g = SpatialGrid::cubic(1, 32, two_pi);
    Mass m(1);
    auto f0 = cosine_wave(g, m, 3, 0);
    auto f1 = evolve_exact(f0, 7.3);
    EXPECT_DOUBLE_EQ(f1.time, 7.3);
    EXPECT_LT(max_diff(f1, cosine_wave(g, m, 3, 7.3)), 1e-12);
}

TEST(EvolveExact, GroupProperty)
{
    SpatialGrid g({8, 8}, {two_pi, 3.0});
    auto s = random_field(g, Mass(1), 2, g.nyquist());
    auto a = evolve_exact(evolve_exact(s, 1.25), 2.5);
    auto b = evolve_exact(s, 3.75);
    auto back = evolve_exact(b, -3.75);
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        EXPECT_NEAR(std::abs(a.alpha[i] - b.alpha[i]), 0, 1e-13);
        EXPECT_NEAR(std::abs(back.alpha[i] - s.alpha[i]), 0, 1e-13);
    }
}

TEST(EvolveExact, ModeSetOnlyAdvancesTime)
{
    ModeSet ms(1, Mass(1), 0.5, {Mode{{1.0}, Complex(1), 1.0}});
    auto e = evolve_exact(ms, 2.0);
    EXPECT_DOUBLE_EQ(e.time(), 2.5);
    EXPECT_EQ(e.modes()[0].amplitude, Complex(1));
}

TEST(EvolveExact, ModeSetAgreesWithLattice)
{
    auto g = SpatialGrid::cubic(1, 16, two_pi);
    ModeSet ms(1, Mass(1), 0, {Mode{{2.0}, Complex(0.3, 0.1), 1.0},
                               Mode{{-5.0}, Complex(-0.2, 0.4), 2.0}});
    auto direct = modeset_to_lattice(evolve_exact(ms, 1.9), g);
    auto via = evolve_exact(modeset_to_lattice(ms, g), 1.9);
    EXPECT_LT(max_diff(direct, via), 1e-13);
}

TEST(Leapfrog, ZeroModeSecondOrder)
{
    // k = 0, m = 1: phi = cos t. Leapfrog error after T scales as dt^2.
    auto g = SpatialGrid::cubic(1, 8, two_pi);
    Mass m(1);
    auto f0 = cosine_wave(g, m, 0, 0);
    double errs[2];
    double dts[2] = {0.02, 0.01};
    for (int j = 0; j < 2; ++j)
    {
        auto steps = static_cast<std::size_t>(std::llround(2.0 / dts[j]));
        auto f = evolve_leapfrog(f0, dts[j], steps);
        EXPECT_NEAR(f.time, 2.0, 1e-12);
        errs[j] = std::abs(f.phi[0] - std::cos(2.0));
    }
    EXPECT_GT(errs[0] / errs[1], 3.9);
    EXPECT_LT(errs[0] / errs[1], 4.1);
    EXPECT_LT(errs[0], 1e-4);
}

TEST(Leapfrog, StabilityBound)
{
    auto g = SpatialGrid::cubic(1, 256, two_pi);
    Mass m(1);
    auto f = LatticeField::zero(g, m);
    double wmax = std::sqrt(128.0 * 128.0 + 1);
    try
    {
        evolve_leapfrog(f, 0.02, 1);
        FAIL() << "expected StabilityError";
    }
    catch (StabilityError const& e)
    {
        EXPECT_DOUBLE_EQ(e.omega_max(), wmax);
        EXPECT_DOUBLE_EQ(e.dt(), 0.02);
        EXPECT_DOUBLE_EQ(e.max_dt(), 2 / wmax);
    }
    EXPECT_THROW(evolve_leapfrog(f, -0.02, 1), StabilityError);
    EXPECT_NO_THROW(evolve_leapfrog(f, 0.015, 1));
}

TEST(Leapfrog, ZeroStepsAndObserver)
{
    auto g = SpatialGrid::cubic(1, 16, two_pi);
    auto f0 = cosine_wave(g, Mass(1), 2, 0);
    auto same = evolve_leapfrog(f0, 0.01, 0);
    EXPECT_EQ(same.phi, f0.phi);
    EXPECT_EQ(same.pi, f0.pi);
    std::vector<double> times;
    auto end = evolve_leapfrog(f0, 0.01, 5, [&](LatticeField const& s) {
        times.push_back(s.time);
    });
    ASSERT_EQ(times.size(), 5u);
    EXPECT_NEAR(times[4], 0.05, 1e-15);
    EXPECT_NEAR(end.time, 0.05, 1e-15);
    auto chunked = evolve_leapfrog(evolve_leapfrog(f0, 0.01, 2), 0.01, 3);
    EXPECT_LT(max_diff(chunked, end), 1e-15);
}

TEST(Leapfrog, TimeReversible)
{
    auto g = SpatialGrid::cubic(1, 32, two_pi);
    auto f0 = cosine_wave(g, Mass(1), 3, 0);
    auto back = evolve_leapfrog(evolve_leapfrog(f0, 0.01, 100), -0.01, 100);
    EXPECT_LT(max_diff(back, f0), 1e-12);
}
