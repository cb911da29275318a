#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "grid.hpp"

namespace kgfield
{
//---------------------------------------------------------------------------//
/*!
 * One continuum plane-wave mode.
 *
 * The amplitude is the complex mass-shell amplitude a(k) (phase chi(k));
 * the weight is the momentum-space cell d^d k the mode stands for. The
 * frequency is always derived from k and the mass.
 */
struct Mode
{
    WaveVector k;
    Complex amplitude{};
    double weight{1};
};

inline double squared_norm(WaveVector const& k)
{
    double s = 0;
    for (double c : k)
        s += c * c;
    return s;
}

//---------------------------------------------------------------------------//
/*!
 * Finite sum of exact plane-wave modes representing the real field
 *
 *   phi(x, t) = sum_j w_j / (2 omega_j)
 *               [a_j e^{-i(omega_j t - k_j.x)} + conj(a_j) e^{+i(...)}]
 *
 * with w_j = weight_j / (2 pi)^d. Each mode carries its own conjugate, so
 * the field is real by construction. Amplitudes refer to t = 0; `time` is
 * the instant the set is evaluated at.
 */
class ModeSet
{
  public:
    ModeSet(std::size_t dim, Mass mass, double time, std::vector<Mode> modes)
        : dim_{dim}, mass_{mass}, time_{time}, modes_{std::move(modes)}
    {
        if (dim_ < 1 || dim_ > 3)
            throw std::invalid_argument("mode set dimension must be 1..3");
        for (std::size_t j = 0; j < modes_.size(); ++j)
        {
            auto const& m = modes_[j];
            if (m.k.size() != dim_)
            {
                throw std::invalid_argument("mode " + std::to_string(j)
                                            + " has wrong dimension");
            }
            if (!(m.weight > 0))
            {
                throw std::invalid_argument("mode " + std::to_string(j)
                                            + " must have weight > 0");
            }
            for (std::size_t i = 0; i < j; ++i)
            {
                if (modes_[i].k == m.k)
                {
                    throw std::invalid_argument(
                        "modes " + std::to_string(i) + " and "
                        + std::to_string(j) + " share a wavevector");
                }
            }
        }
    }

    std::size_t dim() const { return dim_; }
    Mass mass() const { return mass_; }
    double time() const { return time_; }
    std::vector<Mode> const& modes() const { return modes_; }

    double omega(std::size_t j) const
    {
        return mass_.omega(squared_norm(modes_[j].k));
    }

    //! Normalized measure weight / (2 pi)^d.
    double measure(std::size_t j) const
    {
        return modes_[j].weight
               / std::pow(2 * std::numbers::pi, static_cast<double>(dim_));
    }

  private:
    std::size_t dim_;
    Mass mass_;
    double time_;
    std::vector<Mode> modes_;
};

//---------------------------------------------------------------------------//
//! Real field data (phi, pi = d phi / dt) on a periodic lattice.
struct LatticeField
{
    SpatialGrid grid;
    Mass mass;
    double time{0};
    RealArray phi;
    RealArray pi;

    LatticeField(SpatialGrid g, Mass m, double t, RealArray phi_in,
                 RealArray pi_in)
        : grid{std::move(g)}
        , mass{m}
        , time{t}
        , phi{std::move(phi_in)}
        , pi{std::move(pi_in)}
    {
        if (phi.size() != grid.size() || pi.size() != grid.size())
        {
            throw std::invalid_argument(
                "lattice field arrays must match the grid size");
        }
    }

    static LatticeField zero(SpatialGrid g, Mass m, double t = 0)
    {
        auto n = g.size();
        return LatticeField(std::move(g), m, t, RealArray(n), RealArray(n));
    }
};

//---------------------------------------------------------------------------//
/*!
 * Positive-frequency coefficients alpha_k of a real lattice field.
 *
 * At the spectrum's time the field is
 *
 *   phi(x) = (1/V) sum_k [alpha_k e^{i k.x} + conj(alpha_k) e^{-i k.x}],
 *
 * i.e. alpha_k is the instantaneous Fourier coefficient of phi^(+); under
 * free evolution alpha_k(t) = alpha_k(0) e^{-i omega_k t}. A plane wave
 * phi = A e^{i(k.x - omega t)} + c.c. has alpha_k = V A.
 */
struct Spectrum
{
    SpatialGrid grid;
    Mass mass;
    double time{0};
    ComplexArray alpha;

    Spectrum(SpatialGrid g, Mass m, double t, ComplexArray a)
        : grid{std::move(g)}, mass{m}, time{t}, alpha{std::move(a)}
    {
        if (alpha.size() != grid.size())
        {
            throw std::invalid_argument(
                "spectrum coefficients must match the grid size");
        }
    }

    static Spectrum zero(SpatialGrid g, Mass m, double t = 0)
    {
        auto n = g.size();
        return Spectrum(std::move(g), m, t, ComplexArray(n));
    }
};

//---------------------------------------------------------------------------//
namespace detail
{
inline RealArray take_real(ComplexArray const& values, char const* what)
{
    double scale = 0;
    double residue = 0;
    for (auto const& v : values)
    {
        scale = std::max(scale, std::abs(v.real()));
        residue = std::max(residue, std::abs(v.imag()));
    }
    if (residue > 1e-10 * std::max(scale, 1e-300))
    {
        throw ConsistencyError(std::string(what)
                               + " has imaginary residue "
                               + std::to_string(residue) + " at scale "
                               + std::to_string(scale));
    }
    RealArray out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = values[i].real();
    return out;
}

//! True if k = 2 pi m / L for an integer m in [-N/2, N/2).
inline bool admissible_component(double k, double length, std::size_t n)
{
    double m = k * length / (2 * std::numbers::pi);
    double r = std::round(m);
    if (std::abs(m - r) > 1e-9 * std::max(1.0, std::abs(m)))
        return false;
    auto half = static_cast<double>(n / 2);
    return r >= -half && r < half;
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Evaluate a mode set pointwise on the lattice.
 *
 * Every wavevector must be grid-admissible. phi and pi are exact sums of
 * the defining series; no transform is involved.
 */
inline LatticeField modeset_to_lattice(ModeSet const& ms,
                                       SpatialGrid const& grid)
{
    if (ms.dim() != grid.dim())
        throw std::invalid_argument("mode set and grid dimensions differ");
    auto const& modes = ms.modes();
    for (std::size_t j = 0; j < modes.size(); ++j)
    {
        for (std::size_t ax = 0; ax < grid.dim(); ++ax)
        {
            if (!detail::admissible_component(
                    modes[j].k[ax], grid.lengths()[ax], grid.points()[ax]))
            {
                throw std::invalid_argument(
                    "mode " + std::to_string(j)
                    + " has a wavevector that is not admissible on the grid "
                      "(axis "
                    + std::to_string(ax) + ", k="
                    + std::to_string(modes[j].k[ax]) + ")");
            }
        }
    }

    auto field = LatticeField::zero(grid, ms.mass(), ms.time());
    for (std::size_t j = 0; j < modes.size(); ++j)
    {
        double const w = ms.omega(j);
        double const pref = ms.measure(j) / w;
        for (std::size_t p = 0; p < grid.size(); ++p)
        {
            auto x = grid.position(p);
            double phase = -w * ms.time();
            for (std::size_t ax = 0; ax < grid.dim(); ++ax)
                phase += modes[j].k[ax] * x[ax];
            Complex e = modes[j].amplitude * std::polar(1.0, phase);
            // phi = pref Re(e); pi = pref Re(-i w e) = pref w Im(e)
            field.phi[p] += pref * e.real();
            field.pi[p] += pref * w * e.imag();
        }
    }
    return field;
}

//---------------------------------------------------------------------------//
/*!
 * Split lattice data into positive-frequency coefficients,
 * alpha_k = (phi_hat_k + i pi_hat_k / omega_k) / 2.
 */
inline Spectrum lattice_to_spectrum(LatticeField const& f)
{
    auto phi_hat = forward_transform(f.grid, std::span<double const>(f.phi));
    auto pi_hat = forward_transform(f.grid, std::span<double const>(f.pi));
    auto omega = omega_table(f.grid, f.mass);
    ComplexArray alpha(f.grid.size());
    for (std::size_t i = 0; i < alpha.size(); ++i)
    {
        alpha[i] = 0.5 * (phi_hat[i] + Complex(0, 1) * pi_hat[i] / omega[i]);
    }
    return Spectrum(f.grid, f.mass, f.time, std::move(alpha));
}

/*!
 * Reassemble (phi, pi) from positive-frequency coefficients.
 *
 * phi_hat_k = alpha_k + conj(alpha_{-k}),
 * pi_hat_k = -i omega_k (alpha_k - conj(alpha_{-k})).
 */
inline LatticeField spectrum_to_lattice(Spectrum const& s)
{
    auto const& grid = s.grid;
    auto omega = omega_table(grid, s.mass);
    ComplexArray phi_hat(grid.size());
    ComplexArray pi_hat(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        Complex const neg = std::conj(s.alpha[grid.negated(i)]);
        phi_hat[i] = s.alpha[i] + neg;
        pi_hat[i] = Complex(0, -omega[i]) * (s.alpha[i] - neg);
    }
    auto phi = inverse_transform(grid, phi_hat);
    auto pi = inverse_transform(grid, pi_hat);
    return LatticeField(grid,
                        s.mass,
                        s.time,
                        detail::take_real(phi, "reconstructed phi"),
                        detail::take_real(pi, "reconstructed pi"));
}

//---------------------------------------------------------------------------//
/*!
 * Boost every mode along one axis by the given rapidity.
 *
 * (omega, k_axis) is hyperbolically rotated, the amplitude of the scalar
 * field is unchanged and the weight scales with omega'/omega so that
 * weight/omega is preserved. The result is generally not grid-admissible.
 */
inline ModeSet boost_modeset(ModeSet const& ms, double rapidity,
                             std::size_t axis)
{
    if (axis >= ms.dim())
    {
        throw std::invalid_argument("boost axis " + std::to_string(axis)
                                    + " out of range for dimension "
                                    + std::to_string(ms.dim()));
    }
    double const ch = std::cosh(rapidity);
    double const sh = std::sinh(rapidity);
    std::vector<Mode> boosted;
    boosted.reserve(ms.modes().size());
    for (std::size_t j = 0; j < ms.modes().size(); ++j)
    {
        Mode m = ms.modes()[j];
        double const w = ms.omega(j);
        double const kz = m.k[axis];
        m.k[axis] = kz * ch + w * sh;
        double const w_new = w * ch + kz * sh;
        m.weight *= w_new / w;
        boosted.push_back(std::move(m));
    }
    return ModeSet(ms.dim(), ms.mass(), ms.time(), std::move(boosted));
}

//---------------------------------------------------------------------------//
/*!
 * Deterministic band-limited random spectrum.
 *
 * Coefficients with |k| <= band_limit are i.i.d. complex standard normal
 * (real and imaginary parts N(0, 1/2)), drawn in flat index order from a
 * std::mt19937_64 seeded with `seed` and mapped through Box-Muller. Modes
 * with a component on the Nyquist index are left at zero since they have
 * no distinct -k partner.
 */
inline Spectrum random_field(SpatialGrid const& grid, Mass mass,
                             std::uint64_t seed, double band_limit)
{
    if (band_limit < 0 || band_limit > grid.nyquist() * (1 + 1e-12))
    {
        throw std::invalid_argument(
            "band limit must lie in [0, nyquist]; nyquist is "
            + std::to_string(grid.nyquist()));
    }
    std::mt19937_64 engine(seed);
    auto uniform = [&engine] {
        return static_cast<double>(engine() >> 11) * 0x1.0p-53;
    };
    auto k2 = wavevector_squared(grid);
    double const limit2 = band_limit * band_limit * (1 + 1e-12);
    ComplexArray alpha(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        if (k2[i] > limit2 || grid.on_nyquist_plane(i))
            continue;
        double const u1 = 1.0 - uniform();  // (0, 1]
        double const u2 = uniform();
        double const r = std::sqrt(-std::log(u1));  // sqrt(-2 ln u)/sqrt(2)
        alpha[i] = std::polar(r, 2 * std::numbers::pi * u2);
    }
    return Spectrum(grid, mass, 0.0, std::move(alpha));
}

}  // namespace kgfield
