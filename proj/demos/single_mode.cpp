// Single plane wave on a 1D lattice: prints the norm, energy and naive
// self-charge before and after exact evolution.

#include <cstdio>
#include <numbers>

#include "kgfield/kgfield.hpp"

int main()
{
    using namespace kgfield;
    auto grid = SpatialGrid::cubic(1, 64, 2 * std::numbers::pi);
    Mass mass(1.0);

    // phi = A e^{i(kx - wt)} + c.c. with k = 1, A = 1/2
    double const w = mass.omega(1.0);
    double const weight = 2 * w * 2 * std::numbers::pi;
    ModeSet ms(1, mass, 0.0, {Mode{{1.0}, Complex(0.5, 0), weight}});
    auto f = modeset_to_lattice(ms, grid);

    for (double t : {0.0, 10.0})
    {
        auto g = evolve_exact(f, t);
        std::printf("t=%5.1f  norm=%.15f  energy=%.15f  naive=%.3e\n", g.time,
                    norm(g), total_energy(g), naive_symplectic(g, g).imag());
    }
    std::printf("closed form norm 2*pi*sqrt(2) = %.15f\n",
                2 * std::numbers::pi * std::numbers::sqrt2);
    return 0;
}
