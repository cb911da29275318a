#pragma once

// Reference values computed without the library's transforms.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

namespace oracle
{
//! Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(std::function<double(double)> const& f, double a,
                      double b, int n = 2000)
{
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += f(a + i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
}

/*!
 * Norm of phi = A e^{i(kx - wt)} + c.c. on [0, L) at t = 0, from the
 * spatial integral of omega phi^2 + pi^2 / omega. For a single frequency
 * D^{1/2} and D^{-1/2} act as multiplication by omega and 1/omega.
 */
inline double single_mode_norm(double k, double m, double length,
                               std::complex<double> amp, double b = 1)
{
    double w = std::sqrt(k * k + m * m);
    auto phi = [&](double x) {
        return 2 * std::real(amp * std::polar(1.0, k * x));
    };
    auto pi = [&](double x) {
        return 2 * std::real(std::complex<double>(0, -w) * amp
                             * std::polar(1.0, k * x));
    };
    return b * simpson([&](double x) { return w * phi(x) * phi(x)
                                              + pi(x) * pi(x) / w; },
                       0, length);
}

//! Energy (1/2) int [pi^2 + (d_x phi)^2 + m^2 phi^2] of the same wave.
inline double single_mode_energy(double k, double m, double length,
                                 std::complex<double> amp)
{
    double w = std::sqrt(k * k + m * m);
    auto e = [&](double x) {
        auto z = amp * std::polar(1.0, k * x);
        double phi = 2 * std::real(z);
        double pi = 2 * std::real(std::complex<double>(0, -w) * z);
        double dphi = 2 * std::real(std::complex<double>(0, k) * z);
        return 0.5 * (pi * pi + dphi * dphi + m * m * phi * phi);
    };
    return simpson(e, 0, length);
}
}  // namespace oracle
