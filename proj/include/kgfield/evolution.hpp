#pragma once

#include <cmath>
#include <functional>
#include <cstddef>
#include <stdexcept>

#include "errors.hpp"
#include "field.hpp"
#include "spectral_ops.hpp"

namespace kgfield
{
//---------------------------------------------------------------------------//
/*!
 * Exact free evolution: every positive-frequency coefficient rotates as
 * alpha_k -> alpha_k exp(-i omega_k dt).
 */
inline Spectrum evolve_exact(Spectrum const& s, double dt)
{
    auto omega = omega_table(s.grid, s.mass);
    ComplexArray alpha(s.alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i)
        alpha[i] = s.alpha[i] * std::polar(1.0, -omega[i] * dt);
    return Spectrum(s.grid, s.mass, s.time + dt, std::move(alpha));
}

inline LatticeField evolve_exact(LatticeField const& f, double dt)
{
    return spectrum_to_lattice(evolve_exact(lattice_to_spectrum(f), dt));
}

//! Freely evolve a mode set by advancing its evaluation time.
inline ModeSet evolve_exact(ModeSet const& ms, double dt)
{
    return ModeSet(ms.dim(), ms.mass(), ms.time() + dt, ms.modes());
}

//---------------------------------------------------------------------------//
/*!
 * Kick-drift-kick leapfrog for d^2 phi / dt^2 = -D phi.
 *
 * D is applied spectrally, so the only discretization error is in time.
 * Throws StabilityError unless |dt| * omega_max < 2 for the lattice.
 */
/*!
 * `observe`, when given, is called with the state after every step.
 */
inline LatticeField evolve_leapfrog(
    LatticeField const& f, double dt, std::size_t steps,
    std::function<void(LatticeField const&)> const& observe = {})
{
    double const wmax = omega_max(f.grid, f.mass);
    if (!(std::abs(dt) * wmax < 2))
        throw StabilityError(dt, wmax);

    LatticeField state = f;
    if (steps == 0)
        return state;

    auto const n = state.phi.size();
    auto force = apply_operator(OperatorKind::D, state.phi, f.grid, f.mass);
    for (std::size_t step = 0; step < steps; ++step)
    {
        for (std::size_t i = 0; i < n; ++i)
        {
            state.pi[i] -= 0.5 * dt * force[i];
            state.phi[i] += dt * state.pi[i];
        }
        force = apply_operator(OperatorKind::D, state.phi, f.grid, f.mass);
        for (std::size_t i = 0; i < n; ++i)
            state.pi[i] -= 0.5 * dt * force[i];
        if (observe)
        {
            state.time = f.time + static_cast<double>(step + 1) * dt;
            observe(state);
        }
    }
    state.time = f.time + static_cast<double>(steps) * dt;
    return state;
}

}  // namespace kgfield
