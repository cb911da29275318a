#pragma once

#include <stdexcept>
#include <string>

namespace kgfield
{
//! An internal numerical invariant was violated (e.g. a field lost reality).
class ConsistencyError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Leapfrog step exceeds the stability bound dt * omega_max < 2.
class StabilityError : public std::runtime_error
{
  public:
    StabilityError(double dt, double omega_max)
        : std::runtime_error("leapfrog unstable: dt=" + std::to_string(dt)
                             + " with omega_max="
                             + std::to_string(omega_max)
                             + "; require dt < "
                             + std::to_string(2.0 / omega_max))
        , dt_{dt}
        , omega_max_{omega_max}
    {
    }

    double dt() const { return dt_; }
    double omega_max() const { return omega_max_; }
    double max_dt() const { return 2.0 / omega_max_; }

  private:
    double dt_;
    double omega_max_;
};

}  // namespace kgfield
