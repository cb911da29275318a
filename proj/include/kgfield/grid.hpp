#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace kgfield
{
using WaveVector = std::vector<double>;

//---------------------------------------------------------------------------//
/*!
 * Strictly positive field mass (inverse length, hbar = c = 1).
 *
 * m = 0 is rejected: the square root of D = -laplacian + m^2 must be
 * strictly positive on every lattice mode, including k = 0.
 */
class Mass
{
  public:
    explicit Mass(double m) : value_{m}
    {
        if (!(m > 0) || !std::isfinite(m))
        {
            throw std::invalid_argument("mass must be finite and > 0, got "
                                        + std::to_string(m));
        }
    }

    double value() const { return value_; }

    //! On-shell frequency sqrt(k.k + m^2).
    double omega(double k_squared) const
    {
        return std::sqrt(k_squared + value_ * value_);
    }

    friend bool operator==(Mass const&, Mass const&) = default;

  private:
    double value_;
};

//---------------------------------------------------------------------------//
/*!
 * Periodic box of dimension 1..3 with an even number of lattice points per
 * axis.
 *
 * Points sit at x_j = j L / N. Arrays over the grid are stored row-major
 * (last axis fastest), which is also the layout of the DFT coefficients:
 * index i along an axis carries the integer frequency i for i < N/2 and
 * i - N otherwise, so the admissible wavevectors are 2 pi m / L with
 * m in [-N/2, N/2).
 */
class SpatialGrid
{
  public:
    SpatialGrid(std::vector<std::size_t> points, std::vector<double> lengths)
        : points_{std::move(points)}, lengths_{std::move(lengths)}
    {
        if (points_.empty() || points_.size() > 3)
        {
            throw std::invalid_argument("grid dimension must be 1, 2 or 3");
        }
        if (points_.size() != lengths_.size())
        {
            throw std::invalid_argument(
                "grid needs one length per axis");
        }
        for (std::size_t ax = 0; ax < points_.size(); ++ax)
        {
            if (points_[ax] < 2 || points_[ax] % 2 != 0)
            {
                throw std::invalid_argument(
                    "grid points per axis must be even and >= 2, got "
                    + std::to_string(points_[ax]));
            }
            if (!(lengths_[ax] > 0) || !std::isfinite(lengths_[ax]))
            {
                throw std::invalid_argument("box lengths must be > 0");
            }
        }
    }

    //! Cubic grid with the same resolution and length along every axis.
    static SpatialGrid cubic(std::size_t dim, std::size_t n, double length)
    {
        return SpatialGrid(std::vector<std::size_t>(dim, n),
                           std::vector<double>(dim, length));
    }

    std::size_t dim() const { return points_.size(); }
    std::vector<std::size_t> const& points() const { return points_; }
    std::vector<double> const& lengths() const { return lengths_; }

    std::size_t size() const
    {
        std::size_t n = 1;
        for (auto p : points_)
            n *= p;
        return n;
    }

    double volume() const
    {
        double v = 1;
        for (auto l : lengths_)
            v *= l;
        return v;
    }

    //! Quadrature weight V / N^d.
    double cell_volume() const
    {
        return this->volume() / static_cast<double>(this->size());
    }

    //! Momentum-space cell (2 pi)^d / V between neighbouring wavevectors.
    double momentum_cell() const
    {
        return std::pow(2 * std::numbers::pi, static_cast<double>(dim()))
               / this->volume();
    }

    //! Signed DFT frequency of index i along an axis.
    long frequency(std::size_t axis, std::size_t i) const
    {
        auto n = static_cast<long>(points_[axis]);
        auto li = static_cast<long>(i);
        return li < n / 2 ? li : li - n;
    }

    double wavenumber(std::size_t axis, std::size_t i) const
    {
        return 2 * std::numbers::pi
               * static_cast<double>(this->frequency(axis, i))
               / lengths_[axis];
    }

    //! Smallest per-axis Nyquist wavenumber pi N / L.
    double nyquist() const
    {
        double k = std::numbers::pi * static_cast<double>(points_[0])
                   / lengths_[0];
        for (std::size_t ax = 1; ax < dim(); ++ax)
        {
            k = std::min(k, std::numbers::pi
                                * static_cast<double>(points_[ax])
                                / lengths_[ax]);
        }
        return k;
    }

    //! Per-axis integer indices of a flat row-major index.
    std::vector<std::size_t> unflatten(std::size_t flat) const
    {
        std::vector<std::size_t> idx(dim());
        for (std::size_t ax = dim(); ax-- > 0;)
        {
            idx[ax] = flat % points_[ax];
            flat /= points_[ax];
        }
        return idx;
    }

    //! Flat-index distance between neighbors along an axis.
    std::size_t stride(std::size_t axis) const
    {
        std::size_t s = 1;
        for (std::size_t ax = axis + 1; ax < dim(); ++ax)
            s *= points_[ax];
        return s;
    }

    //! Index along one axis of a flat index.
    std::size_t axis_index(std::size_t flat, std::size_t axis) const
    {
        return (flat / this->stride(axis)) % points_[axis];
    }

    std::size_t flatten(std::span<std::size_t const> idx) const
    {
        std::size_t flat = 0;
        for (std::size_t ax = 0; ax < dim(); ++ax)
            flat = flat * points_[ax] + idx[ax];
        return flat;
    }

    //! Flat index of the wavevector -k (Nyquist components map to themselves).
    std::size_t negated(std::size_t flat) const
    {
        std::size_t result = 0;
        std::size_t stride = 1;
        for (std::size_t ax = dim(); ax-- > 0;)
        {
            auto const n = points_[ax];
            auto const i = flat % n;
            flat /= n;
            result += ((n - i) % n) * stride;
            stride *= n;
        }
        return result;
    }

    //! True if any component of the wavevector sits on the Nyquist index.
    bool on_nyquist_plane(std::size_t flat) const
    {
        auto idx = this->unflatten(flat);
        for (std::size_t ax = 0; ax < dim(); ++ax)
        {
            if (idx[ax] == points_[ax] / 2)
                return true;
        }
        return false;
    }

    WaveVector wavevector(std::size_t flat) const
    {
        auto idx = this->unflatten(flat);
        WaveVector k(dim());
        for (std::size_t ax = 0; ax < dim(); ++ax)
            k[ax] = this->wavenumber(ax, idx[ax]);
        return k;
    }

    WaveVector position(std::size_t flat) const
    {
        auto idx = this->unflatten(flat);
        WaveVector x(dim());
        for (std::size_t ax = 0; ax < dim(); ++ax)
        {
            x[ax] = lengths_[ax] * static_cast<double>(idx[ax])
                    / static_cast<double>(points_[ax]);
        }
        return x;
    }

    friend bool operator==(SpatialGrid const&, SpatialGrid const&) = default;

  private:
    std::vector<std::size_t> points_;
    std::vector<double> lengths_;
};

//---------------------------------------------------------------------------//
//! All admissible wavevectors in flat (row-major, DFT-ordered) layout.
inline std::vector<WaveVector> grid_wavevectors(SpatialGrid const& grid)
{
    std::vector<WaveVector> result;
    result.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        result.push_back(grid.wavevector(i));
    return result;
}

//! |k|^2 per flat index.
inline std::vector<double> wavevector_squared(SpatialGrid const& grid)
{
    std::vector<double> k2(grid.size(), 0.0);
    for (std::size_t ax = 0; ax < grid.dim(); ++ax)
    {
        auto const n = grid.points()[ax];
        auto const stride = grid.stride(ax);
        std::vector<double> axis_k2(n);
        for (std::size_t i = 0; i < n; ++i)
            axis_k2[i] = std::pow(grid.wavenumber(ax, i), 2);
        for (std::size_t flat = 0; flat < k2.size(); ++flat)
            k2[flat] += axis_k2[(flat / stride) % n];
    }
    return k2;
}

namespace detail
{
using SharedTable = std::shared_ptr<std::vector<double> const>;

/*!
 * Per-mode tables f(omega_k) keyed by grid, mass and an integer tag.
 *
 * Thread-safe. Entries are immutable; the cache is dropped wholesale when
 * it grows past a few dozen tables.
 */
inline SharedTable cached_mode_table(SpatialGrid const& grid, Mass mass,
                                     int tag,
                                     std::function<double(double)> const& fn)
{
    using Key = std::tuple<std::vector<std::size_t>, std::vector<double>,
                           double, int>;
    static std::mutex mutex;
    static std::map<Key, SharedTable> cache;
    Key key{grid.points(), grid.lengths(), mass.value(), tag};
    {
        std::lock_guard<std::mutex> lock(mutex);
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
    }
    auto k2 = wavevector_squared(grid);
    for (auto& v : k2)
        v = fn(mass.omega(v));
    auto table = std::make_shared<std::vector<double> const>(std::move(k2));
    std::lock_guard<std::mutex> lock(mutex);
    if (cache.size() >= 64)
        cache.clear();
    cache.emplace(std::move(key), table);
    return table;
}
}  // namespace detail

//! omega(k) per flat index.
inline std::vector<double> omega_table(SpatialGrid const& grid, Mass mass)
{
    return *detail::cached_mode_table(
        grid, mass, -1, [](double w) { return w; });
}

//! Largest lattice frequency.
inline double omega_max(SpatialGrid const& grid, Mass mass)
{
    double k2 = 0;
    for (std::size_t ax = 0; ax < grid.dim(); ++ax)
    {
        double kn = std::numbers::pi
                    * static_cast<double>(grid.points()[ax])
                    / grid.lengths()[ax];
        k2 += kn * kn;
    }
    return mass.omega(k2);
}

//---------------------------------------------------------------------------//
/*!
 * Pairwise (cascade) summation.
 *
 * The reduction tree depends only on the length of the input, so results
 * are reproducible regardless of how callers schedule work.
 */
template<class T>
T pairwise_sum(std::span<T const> values)
{
    constexpr std::size_t block = 16;
    if (values.size() <= block)
    {
        T s{};
        for (auto const& v : values)
            s += v;
        return s;
    }
    auto half = values.size() / 2;
    return pairwise_sum(values.first(half))
           + pairwise_sum(values.subspan(half));
}

template<class T>
T pairwise_sum(std::vector<T> const& values)
{
    return pairwise_sum(std::span<T const>(values));
}

}  // namespace kgfield
