#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "grid.hpp"

namespace kgfield
{
using Complex = std::complex<double>;
using ComplexArray = std::vector<Complex>;
using RealArray = std::vector<double>;

namespace detail
{
//---------------------------------------------------------------------------//
/*!
 * Process-wide cache of FFTW plans keyed by shape and direction.
 *
 * The FFTW planner is not reentrant, so planning is serialized. Plans are
 * created with FFTW_UNALIGNED and executed through the new-array interface,
 * which is safe to call concurrently on distinct buffers.
 */
class FftPlanCache
{
  public:
    static FftPlanCache& instance()
    {
        static FftPlanCache cache;
        return cache;
    }

    fftw_plan get(std::vector<std::size_t> const& shape, int sign)
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(shape, sign);
        if (auto it = plans_.find(key); it != plans_.end())
            return it->second;

        std::vector<int> dims(shape.begin(), shape.end());
        std::size_t total = 1;
        for (auto n : shape)
            total *= n;
        ComplexArray scratch(total);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()),
                                       dims.data(),
                                       buf,
                                       buf,
                                       sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(std::move(key), plan);
        return plan;
    }

  private:
    FftPlanCache() = default;
    std::mutex mutex_;
    std::map<std::pair<std::vector<std::size_t>, int>, fftw_plan> plans_;
};

inline void execute(SpatialGrid const& grid, ComplexArray& data, int sign)
{
    auto plan = FftPlanCache::instance().get(grid.points(), sign);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, buf, buf);
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Forward transform  f_hat(k) = (V / N^d) sum_x f(x) exp(-i k.x).
 *
 * With this scaling lattice sums approach the continuum Fourier integral as
 * the grid is refined, and the inverse below carries the 1/V.
 */
inline ComplexArray forward_transform(SpatialGrid const& grid,
                                      std::span<Complex const> values)
{
    ComplexArray data(values.begin(), values.end());
    detail::execute(grid, data, FFTW_FORWARD);
    double const scale = grid.cell_volume();
    for (auto& v : data)
        v *= scale;
    return data;
}

inline ComplexArray forward_transform(SpatialGrid const& grid,
                                      std::span<double const> values)
{
    ComplexArray data(values.begin(), values.end());
    detail::execute(grid, data, FFTW_FORWARD);
    double const scale = grid.cell_volume();
    for (auto& v : data)
        v *= scale;
    return data;
}

//! Inverse transform  f(x) = (1/V) sum_k f_hat(k) exp(i k.x).
inline ComplexArray inverse_transform(SpatialGrid const& grid,
                                      std::span<Complex const> coefficients)
{
    ComplexArray data(coefficients.begin(), coefficients.end());
    detail::execute(grid, data, FFTW_BACKWARD);
    double const scale = 1.0 / grid.volume();
    for (auto& v : data)
        v *= scale;
    return data;
}

}  // namespace kgfield
