#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "field.hpp"
#include "fft.hpp"
#include "grid.hpp"

namespace kgfield
{
//---------------------------------------------------------------------------//
/*!
 * Functions of D = -laplacian + m^2 realized as exact Fourier multipliers:
 * omega^2, omega, 1/omega, sqrt(omega), 1/sqrt(omega).
 */
enum class OperatorKind
{
    D,
    SqrtD,
    InvSqrtD,
    QuarterD,
    InvQuarterD,
};

inline double multiplier(OperatorKind kind, double omega)
{
    switch (kind)
    {
        case OperatorKind::D:
            return omega * omega;
        case OperatorKind::SqrtD:
            return omega;
        case OperatorKind::InvSqrtD:
            return 1.0 / omega;
        case OperatorKind::QuarterD:
            return std::sqrt(omega);
        case OperatorKind::InvQuarterD:
            return 1.0 / std::sqrt(omega);
    }
    return 0;
}

//! Complex field on the lattice (phi^(+), phi^(-), N phi, ...).
struct ComplexLatticeField
{
    SpatialGrid grid;
    Mass mass;
    double time{0};
    ComplexArray values;
};

/*!
 * Complex on-shell data: a field together with its time derivative.
 *
 * Needed wherever an operator built from i d/dt is applied more than once.
 */
struct ComplexPhaseField
{
    SpatialGrid grid;
    Mass mass;
    double time{0};
    ComplexArray phi;
    ComplexArray pi;

    static ComplexPhaseField from(LatticeField const& f)
    {
        return {f.grid,
                f.mass,
                f.time,
                ComplexArray(f.phi.begin(), f.phi.end()),
                ComplexArray(f.pi.begin(), f.pi.end())};
    }
};

//---------------------------------------------------------------------------//
namespace detail
{
inline SharedTable multiplier_table(OperatorKind kind, SpatialGrid const& grid,
                                    Mass mass)
{
    return cached_mode_table(grid, mass, static_cast<int>(kind),
                             [kind](double w) { return multiplier(kind, w); });
}
}  // namespace detail

inline ComplexArray apply_operator(OperatorKind kind,
                                   std::span<Complex const> values,
                                   SpatialGrid const& grid, Mass mass)
{
    auto coeff = forward_transform(grid, values);
    auto const table = detail::multiplier_table(kind, grid, mass);
    for (std::size_t i = 0; i < coeff.size(); ++i)
        coeff[i] *= (*table)[i];
    return inverse_transform(grid, coeff);
}

inline RealArray apply_operator(OperatorKind kind,
                                std::span<double const> values,
                                SpatialGrid const& grid, Mass mass)
{
    auto coeff = forward_transform(grid, values);
    auto const table = detail::multiplier_table(kind, grid, mass);
    for (std::size_t i = 0; i < coeff.size(); ++i)
        coeff[i] *= (*table)[i];
    return detail::take_real(inverse_transform(grid, coeff), "operator image");
}

inline RealArray apply_operator(OperatorKind kind, RealArray const& values,
                                SpatialGrid const& grid, Mass mass)
{
    return apply_operator(kind, std::span<double const>(values), grid, mass);
}

inline ComplexArray apply_operator(OperatorKind kind,
                                   ComplexArray const& values,
                                   SpatialGrid const& grid, Mass mass)
{
    return apply_operator(kind, std::span<Complex const>(values), grid, mass);
}

//---------------------------------------------------------------------------//
namespace detail
{
inline ComplexArray gradient_coefficients(SpatialGrid const& grid,
                                          ComplexArray coeff,
                                          std::size_t axis)
{
    auto const n_axis = grid.points()[axis];
    auto const stride = grid.stride(axis);
    std::vector<double> k(n_axis);
    for (std::size_t i = 0; i < n_axis; ++i)
        k[i] = grid.wavenumber(axis, i);
    // Odd derivative of the unpaired Nyquist wave vanishes on the lattice
    k[n_axis / 2] = 0;
    for (std::size_t i = 0; i < coeff.size(); ++i)
        coeff[i] *= Complex(0, k[(i / stride) % n_axis]);
    return coeff;
}
}  // namespace detail

//! Spectral partial derivative along one axis (Nyquist component dropped).
inline ComplexArray gradient(SpatialGrid const& grid,
                             std::span<Complex const> values, std::size_t axis)
{
    auto coeff = detail::gradient_coefficients(
        grid, forward_transform(grid, values), axis);
    return inverse_transform(grid, coeff);
}

inline RealArray gradient(SpatialGrid const& grid,
                          std::span<double const> values, std::size_t axis)
{
    auto coeff = detail::gradient_coefficients(
        grid, forward_transform(grid, values), axis);
    return detail::take_real(inverse_transform(grid, coeff), "gradient");
}

inline RealArray gradient(SpatialGrid const& grid, RealArray const& values,
                          std::size_t axis)
{
    return gradient(grid, std::span<double const>(values), axis);
}

inline ComplexArray gradient(SpatialGrid const& grid,
                             ComplexArray const& values, std::size_t axis)
{
    return gradient(grid, std::span<Complex const>(values), axis);
}

//---------------------------------------------------------------------------//
/*!
 * Energy projectors on complex on-shell data.
 *
 * P(+/-) (phi, pi) = (phi_s, d/dt phi_s) with
 *   phi_s = (phi +/- i D^{-1/2} pi) / 2,
 *   pi_s  = (pi  -/+ i D^{1/2} phi) / 2,
 * where the second line uses the equation of motion d/dt pi = -D phi.
 */
inline ComplexPhaseField project_state(int sign, ComplexPhaseField const& f)
{
    double const s = sign >= 0 ? 1.0 : -1.0;
    auto u = apply_operator(OperatorKind::InvSqrtD, f.pi,
                            f.grid, f.mass);
    auto v = apply_operator(OperatorKind::SqrtD, f.phi, f.grid, f.mass);
    ComplexPhaseField out{f.grid, f.mass, f.time, f.phi, f.pi};
    Complex const is{0, s};
    for (std::size_t i = 0; i < f.phi.size(); ++i)
    {
        out.phi[i] = 0.5 * (f.phi[i] + is * u[i]);
        out.pi[i] = 0.5 * (f.pi[i] - is * v[i]);
    }
    return out;
}

/*!
 * Positive (sign > 0) or negative (sign < 0) energy part
 * phi^(+/-) = (phi +/- i D^{-1/2} pi) / 2 of a real field.
 *
 * The two parts sum to phi exactly and are complex conjugates.
 */
inline ComplexLatticeField project(int sign, LatticeField const& f)
{
    double const s = sign >= 0 ? 0.5 : -0.5;
    auto u = apply_operator(OperatorKind::InvSqrtD, f.pi, f.grid, f.mass);
    ComplexArray values(f.phi.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = Complex(0.5 * f.phi[i], s * u[i]);
    return {f.grid, f.mass, f.time, std::move(values)};
}

/*!
 * Grading operator N = D^{-1/2} i d/dt on on-shell data.
 *
 * N (phi, pi) = (i D^{-1/2} pi, -i D^{1/2} phi). It has eigenvalue +1 on
 * positive-energy and -1 on negative-energy solutions and squares to the
 * identity.
 */
inline ComplexPhaseField grading_state(ComplexPhaseField const& f)
{
    auto u = apply_operator(OperatorKind::InvSqrtD, f.pi, f.grid, f.mass);
    auto v = apply_operator(OperatorKind::SqrtD, f.phi, f.grid, f.mass);
    ComplexPhaseField out{f.grid, f.mass, f.time, std::move(u), std::move(v)};
    for (std::size_t i = 0; i < out.phi.size(); ++i)
    {
        out.phi[i] *= Complex(0, 1);
        out.pi[i] *= Complex(0, -1);
    }
    return out;
}

//! N phi = phi^(+) - phi^(-) = i D^{-1/2} pi for a real field.
inline ComplexLatticeField grading(LatticeField const& f)
{
    auto u = apply_operator(OperatorKind::InvSqrtD, f.pi, f.grid, f.mass);
    ComplexArray values(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        values[i] = Complex(0, u[i]);
    return {f.grid, f.mass, f.time, std::move(values)};
}

}  // namespace kgfield
