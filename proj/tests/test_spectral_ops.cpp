#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "kgfield/field.hpp"
#include "kgfield/spectral_ops.hpp"

using namespace kgfield;
constexpr double two_pi = 2 * std::numbers::pi;

namespace
{
RealArray sample(SpatialGrid const& g, double (*fn)(double), double k)
{
    RealArray v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        v[i] = fn(k * g.position(i)[0]);
    return v;
}

double max_err(RealArray const& a, RealArray const& b)
{
    double e = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

LatticeField random_lattice(SpatialGrid const& g, Mass m, std::uint64_t seed)
{
    return spectrum_to_lattice(random_field(g, m, seed, 0.5 * g.nyquist()));
}
}  // namespace

TEST(ApplyOperator, MultipliersOnSine)
{
    auto g = SpatialGrid::cubic(1, 64, two_pi);
    Mass m(1.5);
    auto s = sample(g, [](double x) { return std::sin(x); }, 4.0);
    double w = std::sqrt(16 + 2.25);
    struct Case
    {
        OperatorKind kind;
        double factor;
    };
    for (auto c : {Case{OperatorKind::D, w * w}, Case{OperatorKind::SqrtD, w},
                   Case{OperatorKind::InvSqrtD, 1 / w},
                   Case{OperatorKind::QuarterD, std::sqrt(w)},
                   Case{OperatorKind::InvQuarterD, 1 / std::sqrt(w)}})
    {
        auto r = apply_operator(c.kind, s, g, m);
        RealArray expect = s;
        for (auto& v : expect)
            v *= c.factor;
        EXPECT_LT(max_err(r, expect), 1e-12 * c.factor);
    }
}

TEST(ApplyOperator, Compositions)
{
    SpatialGrid g({16, 8}, {two_pi, 4.0});
    Mass m(1);
    auto f = random_lattice(g, m, 3).phi;
    auto ss = apply_operator(OperatorKind::SqrtD,
                             apply_operator(OperatorKind::SqrtD, f, g, m), g, m);
    auto d = apply_operator(OperatorKind::D, f, g, m);
    EXPECT_LT(max_err(ss, d), 1e-12 * 1e2);
    auto id = apply_operator(OperatorKind::InvSqrtD,
                             apply_operator(OperatorKind::SqrtD, f, g, m), g, m);
    EXPECT_LT(max_err(id, f), 1e-13);
    auto qq = apply_operator(OperatorKind::QuarterD,
                             apply_operator(OperatorKind::QuarterD, f, g, m), g, m);
    EXPECT_LT(max_err(qq, apply_operator(OperatorKind::SqrtD, f, g, m)), 1e-12);
}

TEST(ApplyOperator, DMatchesLaplacianStencilFreeOracle)
{
    // D (cos x cos 2y) = (1 + 4 + m^2) cos x cos 2y
    auto g = SpatialGrid::cubic(2, 16, two_pi);
    Mass m(0.5);
    RealArray f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        auto x = g.position(i);
        f[i] = std::cos(x[0]) * std::cos(2 * x[1]);
    }
    auto r = apply_operator(OperatorKind::D, f, g, m);
    for (std::size_t i = 0; i < g.size(); ++i)
        EXPECT_NEAR(r[i], 5.25 * f[i], 1e-13);
}

TEST(Gradient, SineToCosine)
{
    auto g = SpatialGrid::cubic(1, 32, 3.0);
    double k = two_pi * 2 / 3.0;
    auto s = sample(g, [](double x) { return std::sin(x); }, k);
    auto c = sample(g, [](double x) { return std::cos(x); }, k);
    for (auto& v : c)
        v *= k;
    EXPECT_LT(max_err(gradient(g, s, 0), c), 1e-12);
}

TEST(Gradient, AxisSelection)
{
    SpatialGrid g({8, 8}, {two_pi, two_pi});
    RealArray f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        f[i] = std::sin(g.position(i)[1]);
    auto gx = gradient(g, f, 0);
    auto gy = gradient(g, f, 1);
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        EXPECT_NEAR(gx[i], 0, 1e-14);
        EXPECT_NEAR(gy[i], std::cos(g.position(i)[1]), 1e-13);
    }
}

TEST(Gradient, NyquistDropped)
{
    auto g = SpatialGrid::cubic(1, 8, two_pi);
    RealArray alt(8);
    for (std::size_t i = 0; i < 8; ++i)
        alt[i] = (i % 2) ? -1.0 : 1.0;
    for (double v : gradient(g, alt, 0))
        EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(Projectors, CompletenessExactAndConjugate)
{
    auto g = SpatialGrid::cubic(1, 64, two_pi);
    auto f = random_lattice(g, Mass(1), 8);
    auto p = project(+1, f);
    auto n = project(-1, f);
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        EXPECT_EQ(p.values[i] + n.values[i], Complex(f.phi[i]));
        EXPECT_EQ(std::conj(p.values[i]), n.values[i]);
    }
}

TEST(Projectors, PositivePartHasOnlyPositiveFrequencies)
{
    // phi^(+) = (1/V) sum alpha_k e^{ikx}: its DFT is exactly alpha
    auto g = SpatialGrid::cubic(1, 32, two_pi);
    auto s = random_field(g, Mass(1), 4, g.nyquist());
    auto f = spectrum_to_lattice(s);
    auto c = forward_transform(g, project(+1, f).values);
    for (std::size_t i = 0; i < g.size(); ++i)
        EXPECT_NEAR(std::abs(c[i] - s.alpha[i]), 0.0, 1e-12);
}

TEST(Projectors, Algebra)
{
    auto g = SpatialGrid::cubic(2, 16, two_pi);
    auto st = ComplexPhaseField::from(random_lattice(g, Mass(1), 1));
    auto p = project_state(+1, st);
    auto m = project_state(-1, st);
    auto pp = project_state(+1, p);
    auto pm = project_state(+1, m);
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        EXPECT_NEAR(std::abs(pp.phi[i] - p.phi[i]), 0, 1e-13);
        EXPECT_NEAR(std::abs(pp.pi[i] - p.pi[i]), 0, 1e-12);
        EXPECT_NEAR(std::abs(pm.phi[i]), 0, 1e-13);
        EXPECT_NEAR(std::abs(p.phi[i] + m.phi[i] - st.phi[i]), 0, 1e-14);
    }
}

TEST(Grading, DifferenceAndInvolution)
{
    auto g = SpatialGrid::cubic(1, 64, two_pi);
    auto f = random_lattice(g, Mass(2), 5);
    auto n = grading(f);
    auto p = project(+1, f);
    auto q = project(-1, f);
    auto st = ComplexPhaseField::from(f);
    auto nn = grading_state(grading_state(st));
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        EXPECT_NEAR(std::abs(n.values[i] - (p.values[i] - q.values[i])), 0, 1e-14);
        EXPECT_NEAR(std::abs(nn.phi[i] - st.phi[i]), 0, 1e-13);
        EXPECT_NEAR(std::abs(nn.pi[i] - st.pi[i]), 0, 1e-12);
    }
}
