#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "field.hpp"
#include "grid.hpp"
#include "spectral_ops.hpp"

namespace kgfield
{
//---------------------------------------------------------------------------//
/*!
 * Scale b > 0 and mixing parameter a of the conserved current family.
 *
 * a = 0 gives the symmetric inner product; the quadratic form is positive
 * semi-definite iff |a| <= 1.
 */
class ProductParams
{
  public:
    explicit ProductParams(double b = 1, double a = 0) : b_{b}, a_{a}
    {
        if (!(b > 0) || !std::isfinite(b))
            throw std::invalid_argument("product scale b must be > 0");
        if (!std::isfinite(a))
            throw std::invalid_argument("mixing parameter a must be finite");
    }

    double b() const { return b_; }
    double a() const { return a_; }
    bool semidefinite() const { return std::abs(a_) <= 1; }

  private:
    double b_;
    double a_;
};

//! Eigenvalues of M = [[1, i a], [-i a, 1]].
struct MatrixEigenvalues
{
    double plus;
    double minus;
    bool positive_semidefinite;
};

inline MatrixEigenvalues matrix_m_eigenvalues(double a)
{
    return {1 + a, 1 - a, std::abs(a) <= 1};
}

//---------------------------------------------------------------------------//
/*!
 * Current density j^mu. Components are complex: the a-dependent part of the
 * current is i a times a real density, so j is real exactly when a = 0 or
 * both arguments coincide.
 */
struct Current4
{
    ComplexArray j0;
    std::vector<ComplexArray> ji;
    ProductParams params;
    double time{0};

    //! Largest imaginary part over all components.
    double imaginary_residue() const
    {
        double r = 0;
        for (auto const& v : j0)
            r = std::max(r, std::abs(v.imag()));
        for (auto const& comp : ji)
        {
            for (auto const& v : comp)
                r = std::max(r, std::abs(v.imag()));
        }
        return r;
    }
};

//---------------------------------------------------------------------------//
/*!
 * Field data with the time derivatives the current and its divergence need.
 *
 * u = D^{-1/2} pi and its first two time derivatives. On-shell these follow
 * from the equation of motion (udot = -D^{1/2} phi, uddot = -D^{1/2} pi);
 * passing explicit accelerations allows deliberately off-shell input.
 */
struct Kinematics
{
    SpatialGrid grid;
    Mass mass;
    double time{0};
    RealArray phi;
    RealArray pi;
    RealArray acc;
    RealArray u;
    RealArray udot;
    RealArray uddot;

    static Kinematics on_shell(LatticeField const& f)
    {
        auto acc = apply_operator(OperatorKind::D, f.phi, f.grid, f.mass);
        auto udot = apply_operator(OperatorKind::SqrtD, f.phi, f.grid, f.mass);
        auto uddot = apply_operator(OperatorKind::SqrtD, f.pi, f.grid, f.mass);
        for (std::size_t i = 0; i < acc.size(); ++i)
        {
            acc[i] = -acc[i];
            udot[i] = -udot[i];
            uddot[i] = -uddot[i];
        }
        return {f.grid,
                f.mass,
                f.time,
                f.phi,
                f.pi,
                std::move(acc),
                apply_operator(OperatorKind::InvSqrtD, f.pi, f.grid, f.mass),
                std::move(udot),
                std::move(uddot)};
    }

    //! Kinematics with caller-supplied second and third time derivatives.
    static Kinematics with_derivatives(LatticeField const& f, RealArray acc,
                                       RealArray jerk)
    {
        if (acc.size() != f.grid.size() || jerk.size() != f.grid.size())
            throw std::invalid_argument("derivative arrays must match grid");
        auto udot = apply_operator(OperatorKind::InvSqrtD, acc, f.grid, f.mass);
        auto uddot
            = apply_operator(OperatorKind::InvSqrtD, jerk, f.grid, f.mass);
        return {f.grid,
                f.mass,
                f.time,
                f.phi,
                f.pi,
                std::move(acc),
                apply_operator(OperatorKind::InvSqrtD, f.pi, f.grid, f.mass),
                std::move(udot),
                std::move(uddot)};
    }
};

namespace detail
{
template<class A, class B>
void require_compatible(A const& f1, B const& f2)
{
    if (!(f1.grid == f2.grid))
        throw std::invalid_argument("fields live on different grids");
    if (!(f1.mass == f2.mass))
        throw std::invalid_argument("fields have different masses");
    if (f1.time != f2.time)
        throw std::invalid_argument("fields are given at different times");
}

//! Sum of real and imaginary parts with the lattice cell volume applied.
inline Complex integrate(SpatialGrid const& grid, RealArray const& re,
                         RealArray const& im)
{
    double const dv = grid.cell_volume();
    return {dv * pairwise_sum(re), dv * pairwise_sum(im)};
}

inline double integrate(SpatialGrid const& grid, RealArray const& values)
{
    return grid.cell_volume() * pairwise_sum(values);
}

//! q dr - dq r
inline double bidir(double q, double dr, double dq, double r)
{
    return q * dr - dq * r;
}

//! Spatial components j^i; the contravariant index flips the sign of d_i.
inline std::vector<ComplexArray> spatial_current(Kinematics const& k1,
                                                 Kinematics const& k2,
                                                 ProductParams const& p)
{
    auto const& grid = k1.grid;
    auto const n = grid.size();
    double const hb = 0.5 * p.b();
    std::vector<ComplexArray> ji;
    for (std::size_t ax = 0; ax < grid.dim(); ++ax)
    {
        auto gphi1 = gradient(grid, k1.phi, ax);
        auto gphi2 = gradient(grid, k2.phi, ax);
        auto gu1 = gradient(grid, k1.u, ax);
        auto gu2 = gradient(grid, k2.u, ax);
        ComplexArray comp(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            double sym = -bidir(k1.u[i], gphi2[i], gu1[i], k2.phi[i])
                         + bidir(k1.phi[i], gu2[i], gphi1[i], k2.u[i]);
            double mix = -bidir(k1.phi[i], gphi2[i], gphi1[i], k2.phi[i])
                         - bidir(k1.u[i], gu2[i], gu1[i], k2.u[i]);
            comp[i] = Complex(hb * sym, hb * p.a() * mix);
        }
        ji.push_back(std::move(comp));
    }
    return ji;
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Conserved current j^mu_{f1 f2} in projector-free form:
 *
 *   j^mu = (b/2) { u1 <->d^mu phi2 - phi1 <->d^mu u2
 *                  + i a [ phi1 <->d^mu phi2 + u1 <->d^mu u2 ] },
 *
 * with u = D^{-1/2} d/dt phi, q <->d r = q dr - (dq) r and d^i = -d_i.
 * Time derivatives of u come from the equation of motion.
 */
inline Current4 current_density(LatticeField const& f1, LatticeField const& f2,
                                ProductParams const& p)
{
    detail::require_compatible(f1, f2);
    auto const k1 = Kinematics::on_shell(f1);
    auto const k2 = Kinematics::on_shell(f2);
    auto const& grid = f1.grid;
    auto const n = grid.size();
    double const hb = 0.5 * p.b();
    double const a = p.a();

    Current4 cur{ComplexArray(n), {}, p, f1.time};
    for (std::size_t i = 0; i < n; ++i)
    {
        double sym = detail::bidir(k1.u[i], k2.pi[i], k1.udot[i], k2.phi[i])
                     - detail::bidir(k1.phi[i], k2.udot[i], k1.pi[i], k2.u[i]);
        double mix = detail::bidir(k1.phi[i], k2.pi[i], k1.pi[i], k2.phi[i])
                     + detail::bidir(k1.u[i], k2.udot[i], k1.udot[i], k2.u[i]);
        cur.j0[i] = Complex(hb * sym, hb * a * mix);
    }
    cur.ji = detail::spatial_current(k1, k2, p);
    return cur;
}

//---------------------------------------------------------------------------//
struct ContinuityResidual
{
    double absolute{0};  //!< max |d_t j^0 + div j|
    double scale{0};  //!< max(max |d_t j^0|, max |div j|)
    double relative{0};  //!< absolute / scale, 0 for vanishing currents
};

/*!
 * Local continuity check d_t j^0 + d_i j^i.
 *
 * d_t j^0 is assembled analytically from the supplied time derivatives; the
 * divergence is the spectral derivative of the sampled spatial current.
 * The latter is exact only if the pointwise products stay below Nyquist,
 * i.e. for fields band-limited to half the Nyquist wavenumber.
 */
inline ContinuityResidual continuity_residual(Kinematics const& k1,
                                              Kinematics const& k2,
                                              ProductParams const& p)
{
    detail::require_compatible(k1, k2);
    auto const& grid = k1.grid;
    auto const n = grid.size();
    double const hb = 0.5 * p.b();
    double const a = p.a();

    ComplexArray dt_j0(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        double sym = detail::bidir(k1.u[i], k2.acc[i], k1.uddot[i], k2.phi[i])
                     - detail::bidir(k1.phi[i], k2.uddot[i], k1.acc[i], k2.u[i]);
        double mix
            = detail::bidir(k1.phi[i], k2.acc[i], k1.acc[i], k2.phi[i])
              + detail::bidir(k1.u[i], k2.uddot[i], k1.uddot[i], k2.u[i]);
        dt_j0[i] = Complex(hb * sym, hb * a * mix);
    }

    ComplexArray div(n);
    auto const ji = detail::spatial_current(k1, k2, p);
    for (std::size_t ax = 0; ax < grid.dim(); ++ax)
    {
        auto d = gradient(grid, ji[ax], ax);
        for (std::size_t i = 0; i < n; ++i)
            div[i] += d[i];
    }

    ContinuityResidual r;
    double max_dt = 0;
    double max_div = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        r.absolute = std::max(r.absolute, std::abs(dt_j0[i] + div[i]));
        max_dt = std::max(max_dt, std::abs(dt_j0[i]));
        max_div = std::max(max_div, std::abs(div[i]));
    }
    r.scale = std::max(max_dt, max_div);
    r.relative = r.scale > 0 ? r.absolute / r.scale : 0;
    return r;
}

inline ContinuityResidual continuity_residual(LatticeField const& f1,
                                              LatticeField const& f2,
                                              ProductParams const& p)
{
    detail::require_compatible(f1, f2);
    return continuity_residual(
        Kinematics::on_shell(f1), Kinematics::on_shell(f2), p);
}

//---------------------------------------------------------------------------//
/*!
 * Bilinear form as a spatial integral,
 *
 *   b int d^dx { phi1 D^{1/2} phi2 + pi1 D^{-1/2} pi2
 *                + i a (phi1 pi2 - pi1 phi2) }.
 *
 * Real and symmetric at a = 0.
 */
inline Complex inner_product_spatial(LatticeField const& f1,
                                     LatticeField const& f2,
                                     ProductParams const& p)
{
    detail::require_compatible(f1, f2);
    auto sqrt_d_phi2
        = apply_operator(OperatorKind::SqrtD, f2.phi, f2.grid, f2.mass);
    auto inv_sqrt_d_pi2
        = apply_operator(OperatorKind::InvSqrtD, f2.pi, f2.grid, f2.mass);
    auto const n = f1.grid.size();
    RealArray re(n);
    RealArray im(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        re[i] = f1.phi[i] * sqrt_d_phi2[i] + f1.pi[i] * inv_sqrt_d_pi2[i];
        im[i] = detail::bidir(f1.phi[i], f2.pi[i], f1.pi[i], f2.phi[i]);
    }
    auto raw = detail::integrate(f1.grid, re, im);
    return p.b() * Complex(raw.real(), p.a() * raw.imag());
}

/*!
 * Bilinear form as the quadratic form b int v1^T M v2 with
 * v = (D^{1/4} phi, D^{-1/4} pi) and M = [[1, i a], [-i a, 1]].
 */
inline Complex inner_product_quadform(LatticeField const& f1,
                                      LatticeField const& f2,
                                      ProductParams const& p)
{
    detail::require_compatible(f1, f2);
    auto const& g = f1.grid;
    auto q1 = apply_operator(OperatorKind::QuarterD, f1.phi, g, f1.mass);
    auto r1 = apply_operator(OperatorKind::InvQuarterD, f1.pi, g, f1.mass);
    bool const same = &f1 == &f2;
    auto q2 = same ? q1
                   : apply_operator(OperatorKind::QuarterD, f2.phi, g, f2.mass);
    auto r2 = same ? r1
                   : apply_operator(OperatorKind::InvQuarterD, f2.pi, g, f2.mass);
    auto const n = g.size();
    RealArray re(n);
    RealArray im(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        re[i] = q1[i] * q2[i] + r1[i] * r2[i];
        im[i] = q1[i] * r2[i] - r1[i] * q2[i];
    }
    auto raw = detail::integrate(g, re, im);
    return p.b() * Complex(raw.real(), p.a() * raw.imag());
}

/*!
 * Bilinear form as a sum over lattice modes,
 * (b/V) sum_k 4 omega_k [Re(conj(a1) a2) + i a Im(conj(a1) a2)].
 */
inline Complex inner_product_modes(Spectrum const& s1, Spectrum const& s2,
                                   ProductParams const& p)
{
    detail::require_compatible(s1, s2);
    auto omega = omega_table(s1.grid, s1.mass);
    auto const n = s1.grid.size();
    RealArray re(n);
    RealArray im(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        Complex c = std::conj(s1.alpha[i]) * s2.alpha[i];
        re[i] = 4 * omega[i] * c.real();
        im[i] = 4 * omega[i] * c.imag();
    }
    double const scale = p.b() / s1.grid.volume();
    return scale * Complex(pairwise_sum(re), p.a() * pairwise_sum(im));
}

/*!
 * Bilinear form of two continuum mode sets,
 * b sum_j (w_j / omega_j) [Re(conj(a1) a2) + i a Im(conj(a1) a2)],
 * the discrete version of int d^dp / ((2 pi)^d 2 omega) 2 b conj(a1) a2.
 *
 * Both sets must contain the same wavevectors (any order) with equal weights.
 */
inline Complex inner_product_modes(ModeSet const& m1, ModeSet const& m2,
                                   ProductParams const& p)
{
    if (m1.dim() != m2.dim() || !(m1.mass() == m2.mass()))
        throw std::invalid_argument("mode sets differ in dimension or mass");
    auto const& a = m1.modes();
    auto const& b = m2.modes();
    if (a.size() != b.size())
        throw std::invalid_argument("mode sets cannot be aligned: sizes differ");
    RealArray re(a.size());
    RealArray im(a.size());
    for (std::size_t j = 0; j < a.size(); ++j)
    {
        auto it = std::find_if(b.begin(), b.end(), [&](Mode const& m) {
            return m.k == a[j].k;
        });
        if (it == b.end())
        {
            throw std::invalid_argument("mode sets cannot be aligned: mode "
                                        + std::to_string(j)
                                        + " has no partner");
        }
        if (std::abs(it->weight - a[j].weight)
            > 1e-12 * std::max(it->weight, a[j].weight))
        {
            throw std::invalid_argument("mode sets cannot be aligned: mode "
                                        + std::to_string(j)
                                        + " weights differ");
        }
        Complex c = std::conj(a[j].amplitude) * it->amplitude;
        double const w = m1.measure(j) / m1.omega(j);
        re[j] = w * c.real();
        im[j] = w * c.imag();
    }
    return p.b() * Complex(pairwise_sum(re), p.a() * pairwise_sum(im));
}

//---------------------------------------------------------------------------//
//! Per-mode contributions (b/V) 4 omega_k |alpha_k|^2 to the norm.
inline RealArray norm_contributions(Spectrum const& s, double b = 1)
{
    ProductParams p(b);
    auto omega = omega_table(s.grid, s.mass);
    double const scale = p.b() / s.grid.volume();
    RealArray out(s.alpha.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = scale * 4 * omega[i] * std::norm(s.alpha[i]);
    return out;
}

inline double norm(Spectrum const& s, double b = 1)
{
    return pairwise_sum(norm_contributions(s, b));
}

/*!
 * Norm (f, f)_{b,a}, independent of a. Evaluated as the a = 0 quadratic
 * form, a sum of squares, so it is non-negative in floating point too.
 */
inline double norm(LatticeField const& f, double b = 1)
{
    return inner_product_quadform(f, f, ProductParams(b)).real();
}

inline double norm(ModeSet const& ms, double b = 1)
{
    ProductParams p(b);
    RealArray terms(ms.modes().size());
    for (std::size_t j = 0; j < terms.size(); ++j)
    {
        terms[j] = ms.measure(j) * std::norm(ms.modes()[j].amplitude)
                   / ms.omega(j);
    }
    return p.b() * pairwise_sum(terms);
}

//---------------------------------------------------------------------------//
/*!
 * Textbook charge int d^dx phi1 i <->d_t phi2. Antisymmetric, so it vanishes
 * identically for a single real field.
 */
inline Complex naive_symplectic(LatticeField const& f1, LatticeField const& f2)
{
    detail::require_compatible(f1, f2);
    RealArray terms(f1.grid.size());
    for (std::size_t i = 0; i < terms.size(); ++i)
        terms[i] = detail::bidir(f1.phi[i], f2.pi[i], f1.pi[i], f2.phi[i]);
    return {0, detail::integrate(f1.grid, terms)};
}

//! E = int d^dx (pi^2 + |grad phi|^2 + m^2 phi^2) / 2.
inline double total_energy(LatticeField const& f)
{
    double const m2 = f.mass.value() * f.mass.value();
    auto const n = f.grid.size();
    RealArray density(n);
    for (std::size_t i = 0; i < n; ++i)
        density[i] = f.pi[i] * f.pi[i] + m2 * f.phi[i] * f.phi[i];
    for (std::size_t ax = 0; ax < f.grid.dim(); ++ax)
    {
        auto g = gradient(f.grid, f.phi, ax);
        for (std::size_t i = 0; i < n; ++i)
            density[i] += g[i] * g[i];
    }
    return 0.5 * detail::integrate(f.grid, density);
}

}  // namespace kgfield
