#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <limits>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "evolution.hpp"
#include "field.hpp"
#include "products.hpp"
#include "spectral_ops.hpp"

namespace kgfield
{
//---------------------------------------------------------------------------//
// CONVERGENCE STUDY
//---------------------------------------------------------------------------//
struct ConvergenceRow
{
    double dt;
    std::size_t steps;
    double error;  //!< max over the lattice of |phi - phi_exact|, |pi - pi_exact|
};

struct ConvergenceTable
{
    std::vector<ConvergenceRow> rows;
    std::vector<double> ratios;  //!< error[i] / error[i+1]
    std::optional<double> fitted_order;  //!< least-squares slope of log error
};

/*!
 * Leapfrog error at t_final against exact spectral evolution, one row per
 * time step. Each dt must divide t_final and satisfy the stability bound.
 */
inline ConvergenceTable convergence_study(std::vector<double> const& dt_list,
                                          double t_final,
                                          LatticeField const& field)
{
    double const wmax = omega_max(field.grid, field.mass);
    for (double dt : dt_list)
    {
        if (!(dt > 0))
            throw std::invalid_argument("time steps must be positive");
        if (!(dt * wmax < 2))
            throw StabilityError(dt, wmax);
    }
    if (t_final < 0)
        throw std::invalid_argument("t_final must be >= 0");

    auto const exact = evolve_exact(field, t_final);
    ConvergenceTable table;
    for (double dt : dt_list)
    {
        double const ratio = t_final / dt;
        auto const steps = static_cast<std::size_t>(std::llround(ratio));
        if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * (1 + ratio))
        {
            throw std::invalid_argument("dt=" + std::to_string(dt)
                                        + " does not divide t_final");
        }
        auto approx = evolve_leapfrog(field, dt, steps);
        double err = 0;
        for (std::size_t i = 0; i < field.phi.size(); ++i)
        {
            err = std::max(err, std::abs(approx.phi[i] - exact.phi[i]));
            err = std::max(err, std::abs(approx.pi[i] - exact.pi[i]));
        }
        if (steps == 0)
            err = 0;
        table.rows.push_back({dt, steps, err});
    }
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i)
    {
        auto const next = table.rows[i + 1].error;
        table.ratios.push_back(next > 0 ? table.rows[i].error / next : 0.0);
    }
    bool const fittable
        = table.rows.size() >= 2
          && std::all_of(table.rows.begin(), table.rows.end(),
                         [](ConvergenceRow const& r) { return r.error > 0; });
    if (fittable)
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        double const n = static_cast<double>(table.rows.size());
        for (auto const& r : table.rows)
        {
            double x = std::log(r.dt);
            double y = std::log(r.error);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        table.fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return table;
}

//---------------------------------------------------------------------------//
/*!
 * Net linear trend of a deviation series relative to its size:
 * |least-squares slope| * (t_last - t_first) / max |dev|.
 *
 * About 1 for steady growth, near 0 for oscillation about a fixed level.
 * Returns 0 for an identically zero series.
 */
inline double secular_trend(std::vector<double> const& times,
                            std::vector<double> const& devs)
{
    if (times.size() != devs.size())
        throw std::invalid_argument("series lengths differ");
    if (times.size() < 2)
        return 0;
    double const n = static_cast<double>(times.size());
    double st = 0, sd = 0, stt = 0, std_ = 0, peak = 0;
    for (std::size_t i = 0; i < times.size(); ++i)
    {
        st += times[i];
        sd += devs[i];
        stt += times[i] * times[i];
        std_ += times[i] * devs[i];
        peak = std::max(peak, std::abs(devs[i]));
    }
    if (peak == 0)
        return 0;
    double const slope = (n * std_ - st * sd) / (n * stt - st * st);
    return std::abs(slope) * (times.back() - times.front()) / peak;
}

//---------------------------------------------------------------------------//
// SUITE CONFIGURATION AND REPORT
//---------------------------------------------------------------------------//
inline std::vector<std::string> const& suite_names()
{
    static std::vector<std::string> const names{"projector-algebra",
                                                "conservation-exact",
                                                "conservation-leapfrog",
                                                "a-independence",
                                                "positivity",
                                                "triple-equivalence",
                                                "parseval",
                                                "boost-invariance",
                                                "continuity",
                                                "naive-vanishing",
                                                "energy-relation",
                                                "convergence-order"};
    return names;
}

struct SuiteConfig
{
    std::uint64_t seed{20060};
    SpatialGrid grid{SpatialGrid::cubic(1, 256, 2 * std::numbers::pi)};
    Mass mass{1.0};
    //! Overrides keyed by full check name, suite name, or "*".
    std::map<std::string, double> tolerances;
    //! Suites to run; empty means all.
    std::vector<std::string> suites;
    //! Worker threads for running suites concurrently; 0 = hardware.
    std::size_t threads{0};
};

enum class Comparison
{
    at_most,  //!< measured <= tolerance
    at_least,  //!< measured >= tolerance
    greater,  //!< measured > tolerance
};

inline char const* to_string(Comparison c)
{
    switch (c)
    {
        case Comparison::at_most:
            return "<=";
        case Comparison::at_least:
            return ">=";
        case Comparison::greater:
            return ">";
    }
    return "?";
}

struct CheckResult
{
    std::string name;  //!< "suite/check"
    double measured{0};
    double tolerance{0};
    Comparison comparison{Comparison::at_most};
    bool pass{false};
    std::string note;
};

struct Report
{
    std::vector<CheckResult> checks;
    bool pass{false};
    SpatialGrid grid;
    Mass mass;
    std::uint64_t seed{0};
    std::vector<std::string> suites;

    nlohmann::json to_json() const
    {
        nlohmann::json checks_json = nlohmann::json::array();
        for (auto const& c : checks)
        {
            nlohmann::json jc{{"name", c.name},
                              {"measured", c.measured},
                              {"tolerance", c.tolerance},
                              {"comparison", to_string(c.comparison)},
                              {"pass", c.pass}};
            if (!c.note.empty())
                jc["note"] = c.note;
            checks_json.push_back(std::move(jc));
        }
        return {{"pass", pass},
                {"environment",
                 {{"dim", grid.dim()},
                  {"points", grid.points()},
                  {"lengths", grid.lengths()},
                  {"mass", mass.value()},
                  {"seed", seed}}},
                {"suites", suites},
                {"checks", checks_json}};
    }

    std::string summary_table() const
    {
        std::ostringstream os;
        std::size_t width = 5;
        for (auto const& c : checks)
            width = std::max(width, c.name.size());
        std::size_t failed = 0;
        for (auto const& c : checks)
        {
            char line[64];
            std::snprintf(line, sizeof(line), "%-4s  ",
                          c.pass ? "PASS" : "FAIL");
            os << line << c.name << std::string(width - c.name.size() + 2, ' ');
            std::snprintf(line, sizeof(line), "%12.4e %-2s %10.3e",
                          c.measured, to_string(c.comparison), c.tolerance);
            os << line;
            if (!c.note.empty())
                os << "  (" << c.note << ")";
            os << '\n';
            failed += c.pass ? 0 : 1;
        }
        os << (pass ? "ALL PASS" : "FAILED") << ": " << checks.size() - failed
           << "/" << checks.size() << " checks passed\n";
        return os.str();
    }
};

//---------------------------------------------------------------------------//
// SUITE IMPLEMENTATION
//---------------------------------------------------------------------------//
namespace detail
{
inline double max_abs(ComplexArray const& a)
{
    double m = 0;
    for (auto const& v : a)
        m = std::max(m, std::abs(v));
    return m;
}

inline double max_abs(RealArray const& a)
{
    double m = 0;
    for (auto v : a)
        m = std::max(m, std::abs(v));
    return m;
}

inline double max_abs_diff(ComplexArray const& a, ComplexArray const& b)
{
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs_diff(RealArray const& a, RealArray const& b)
{
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

//! max |a - b| / max(|a|, |b|) over the arrays.
template<class Array>
double rel_diff(Array const& a, Array const& b)
{
    double scale = std::max(max_abs(a), max_abs(b));
    double d = max_abs_diff(a, b);
    return scale > 0 ? d / scale : d;
}

template<class T>
double rel_diff_scalar(T a, T b)
{
    double scale = std::max(std::abs(a), std::abs(b));
    double d = std::abs(a - b);
    return scale > 0 ? d / scale : d;
}

/*!
 * Projector form of the bilinear form,
 * b int { (a+1) phi1^- i<->d_t phi2^+ + (a-1) phi1^+ i<->d_t phi2^- }.
 *
 * Independent cross-check of the projector-free production path.
 */
inline Complex projector_form_product(LatticeField const& f1,
                                      LatticeField const& f2,
                                      ProductParams const& p)
{
    auto c1 = ComplexPhaseField::from(f1);
    auto c2 = ComplexPhaseField::from(f2);
    auto plus1 = project_state(+1, c1);
    auto minus1 = project_state(-1, c1);
    auto plus2 = project_state(+1, c2);
    auto minus2 = project_state(-1, c2);
    auto const n = f1.grid.size();
    ComplexArray terms(n);
    Complex const i{0, 1};
    for (std::size_t j = 0; j < n; ++j)
    {
        Complex mp = i
                     * (minus1.phi[j] * plus2.pi[j]
                        - minus1.pi[j] * plus2.phi[j]);
        Complex pm = i
                     * (plus1.phi[j] * minus2.pi[j]
                        - plus1.pi[j] * minus2.phi[j]);
        terms[j] = (p.a() + 1) * mp + (p.a() - 1) * pm;
    }
    return p.b() * f1.grid.cell_volume()
           * pairwise_sum(std::span<Complex const>(terms));
}

//! Free evolution of a purely positive- or negative-frequency complex field.
inline ComplexArray evolve_signed(SpatialGrid const& grid, Mass mass,
                                  ComplexArray const& values, int sign,
                                  double dt)
{
    auto coeff = forward_transform(grid, values);
    auto omega = omega_table(grid, mass);
    double const s = sign >= 0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < coeff.size(); ++i)
        coeff[i] *= std::polar(1.0, s * omega[i] * dt);
    return inverse_transform(grid, coeff);
}

//! Plane wave A e^{i(k.x - omega t)} + c.c. along axis 0 with integer k index.
inline LatticeField plane_wave(SpatialGrid const& grid, Mass mass, long index,
                               Complex amplitude)
{
    WaveVector k(grid.dim(), 0.0);
    k[0] = 2 * std::numbers::pi * static_cast<double>(index)
           / grid.lengths()[0];
    // weight such that w / (2 omega (2 pi)^d) = 1, i.e. prefactor of A is one
    double const w = mass.omega(squared_norm(k));
    double const weight
        = 2 * w * std::pow(2 * std::numbers::pi, static_cast<double>(grid.dim()));
    ModeSet ms(grid.dim(), mass, 0.0, {Mode{k, amplitude, weight}});
    return modeset_to_lattice(ms, grid);
}

class SuiteRunner
{
  public:
    SuiteRunner(SuiteConfig const& cfg, std::string suite)
        : cfg_{cfg}, suite_{std::move(suite)}
    {
    }

    std::vector<CheckResult> run()
    {
        static std::map<std::string, void (SuiteRunner::*)()> const table{
            {"projector-algebra", &SuiteRunner::projector_algebra},
            {"conservation-exact", &SuiteRunner::conservation_exact},
            {"conservation-leapfrog", &SuiteRunner::conservation_leapfrog},
            {"a-independence", &SuiteRunner::a_independence},
            {"positivity", &SuiteRunner::positivity},
            {"triple-equivalence", &SuiteRunner::triple_equivalence},
            {"parseval", &SuiteRunner::parseval},
            {"boost-invariance", &SuiteRunner::boost_invariance},
            {"continuity", &SuiteRunner::continuity},
            {"naive-vanishing", &SuiteRunner::naive_vanishing},
            {"energy-relation", &SuiteRunner::energy_relation},
            {"convergence-order", &SuiteRunner::convergence_order},
        };
        try
        {
            (this->*table.at(suite_))();
        }
        catch (std::exception const& e)
        {
            // An exception inside a suite is a failure, never a skip
            CheckResult r;
            r.name = suite_ + "/exception";
            r.measured = 1;
            r.tolerance = 0;
            r.pass = false;
            r.note = e.what();
            results_.push_back(std::move(r));
        }
        return std::move(results_);
    }

  private:
    SuiteConfig const& cfg_;
    std::string suite_;
    std::vector<CheckResult> results_;

    //// HELPERS ////

    double tolerance(std::string const& check, double fallback) const
    {
        auto const& t = cfg_.tolerances;
        if (auto it = t.find(suite_ + "/" + check); it != t.end())
            return it->second;
        if (auto it = t.find(suite_); it != t.end())
            return it->second;
        if (auto it = t.find("*"); it != t.end())
            return it->second;
        return fallback;
    }

    void record(std::string const& check, double measured, double fallback,
                Comparison cmp = Comparison::at_most, std::string note = {})
    {
        CheckResult r;
        r.name = suite_ + "/" + check;
        r.measured = measured;
        r.tolerance = this->tolerance(check, fallback);
        r.comparison = cmp;
        switch (cmp)
        {
            case Comparison::at_most:
                r.pass = measured <= r.tolerance;
                break;
            case Comparison::at_least:
                r.pass = measured >= r.tolerance;
                break;
            case Comparison::greater:
                r.pass = measured > r.tolerance;
                break;
        }
        if (std::isnan(measured))
            r.pass = false;
        r.note = std::move(note);
        results_.push_back(std::move(r));
    }

    std::uint64_t seed(std::uint64_t salt) const
    {
        // Distinct, reproducible stream per suite and per draw
        std::uint64_t h = cfg_.seed * 0x9E3779B97F4A7C15ull;
        for (char c : suite_)
            h = (h ^ static_cast<unsigned char>(c)) * 0x100000001B3ull;
        return h + salt * 0xBF58476D1CE4E5B9ull;
    }

    //! Band limit that keeps pointwise products resolved on the lattice.
    double band() const { return 0.25 * cfg_.grid.nyquist(); }

    Spectrum spectrum(std::uint64_t salt, double band_limit = -1) const
    {
        return random_field(cfg_.grid,
                            cfg_.mass,
                            this->seed(salt),
                            band_limit < 0 ? this->band() : band_limit);
    }

    LatticeField field(std::uint64_t salt, double band_limit = -1) const
    {
        return spectrum_to_lattice(this->spectrum(salt, band_limit));
    }

    //// SUITES ////

    void projector_algebra()
    {
        auto const& g = cfg_.grid;
        auto const f = this->field(1);
        auto const plus = project(+1, f);
        auto const minus = project(-1, f);

        double completeness = 0;
        double conj_err = 0;
        double conj_scale = 0;
        for (std::size_t i = 0; i < f.phi.size(); ++i)
        {
            completeness = std::max(
                completeness,
                std::abs(plus.values[i] + minus.values[i] - Complex(f.phi[i])));
            conj_err = std::max(
                conj_err, std::abs(std::conj(plus.values[i]) - minus.values[i]));
            conj_scale = std::max(conj_scale, std::abs(plus.values[i]));
        }
        this->record("completeness", completeness, 0.0);
        this->record("conjugate-parts", conj_err / conj_scale, 1e-12);

        auto const state = ComplexPhaseField::from(f);
        auto const sp = project_state(+1, state);
        auto const sm = project_state(-1, state);
        auto const spp = project_state(+1, sp);
        auto const smm = project_state(-1, sm);
        this->record("idempotent-plus",
                     std::max(rel_diff(spp.phi, sp.phi), rel_diff(spp.pi, sp.pi)),
                     1e-12);
        this->record("idempotent-minus",
                     std::max(rel_diff(smm.phi, sm.phi), rel_diff(smm.pi, sm.pi)),
                     1e-12);
        auto const spm = project_state(+1, sm);
        auto const smp = project_state(-1, sp);
        double const scale = max_abs(sp.phi);
        this->record("orthogonal",
                     std::max(max_abs(spm.phi), max_abs(smp.phi)) / scale,
                     1e-12);
        // projected values agree with the real-field projector
        this->record("state-matches-field",
                     std::max(rel_diff(sp.phi, plus.values),
                              rel_diff(sm.phi, minus.values)),
                     1e-13);

        auto const graded = grading(f);
        ComplexArray diff(f.phi.size());
        for (std::size_t i = 0; i < diff.size(); ++i)
            diff[i] = plus.values[i] - minus.values[i];
        this->record("grading-difference", rel_diff(graded.values, diff), 1e-13);

        auto const nn = grading_state(grading_state(state));
        this->record("grading-involution",
                     std::max(rel_diff(nn.phi, state.phi),
                              rel_diff(nn.pi, state.pi)),
                     1e-12);
        auto const np = grading_state(sp);
        auto const nm = grading_state(sm);
        ComplexArray neg_sm = sm.phi;
        for (auto& v : neg_sm)
            v = -v;
        this->record("grading-eigenvalues",
                     std::max(rel_diff(np.phi, sp.phi), rel_diff(nm.phi, neg_sm)),
                     1e-12);

        // A single-frequency solution of the half equations solves the full
        // equation: D phi = -d_t^2 phi = omega^2 phi.
        // Built from a single spectral coefficient: pointwise evaluation
        // leaves broadband rounding noise that D amplifies by omega_max^2.
        auto single = Spectrum::zero(g, cfg_.mass);
        std::vector<std::size_t> idx(g.dim(), 0);
        idx[0] = 3;
        single.alpha[g.flatten(idx)] = g.volume() * Complex(0.4, -0.2);
        auto const wave = spectrum_to_lattice(single);
        double const w = omega_table(g, cfg_.mass)[g.flatten(idx)];
        auto const dphi = apply_operator(OperatorKind::D, wave.phi, g, cfg_.mass);
        RealArray rhs = wave.phi;
        for (auto& v : rhs)
            v *= w * w;
        this->record("half-equation-solves-kg", rel_diff(dphi, rhs), 1e-12);
    }

    void conservation_exact()
    {
        auto const& g = cfg_.grid;
        double const t_end = 20.0 / cfg_.mass.value();
        ProductParams const sym(1.0);
        auto const s1 = this->spectrum(1);
        auto const s2 = this->spectrum(2);
        auto const f1 = spectrum_to_lattice(s1);
        auto const f2 = spectrum_to_lattice(s2);
        auto const ip0 = inner_product_spatial(f1, f2, sym);
        auto const quad0 = inner_product_quadform(f1, f2, sym);
        auto const modes0 = inner_product_modes(s1, s2, sym);
        double const e0 = total_energy(f1);
        double const n0 = norm(f1);

        double drift_ip = 0, drift_quad = 0, drift_modes = 0;
        double drift_energy = 0, drift_norm = 0;
        constexpr int samples = 20;
        for (int step = 1; step <= samples; ++step)
        {
            double t = t_end * step / samples;
            auto e1 = evolve_exact(s1, t);
            auto e2 = evolve_exact(s2, t);
            auto l1 = spectrum_to_lattice(e1);
            auto l2 = spectrum_to_lattice(e2);
            drift_ip = std::max(
                drift_ip, rel_diff_scalar(inner_product_spatial(l1, l2, sym), ip0));
            drift_quad = std::max(
                drift_quad,
                rel_diff_scalar(inner_product_quadform(l1, l2, sym), quad0));
            drift_modes = std::max(
                drift_modes, rel_diff_scalar(inner_product_modes(e1, e2, sym), modes0));
            drift_energy
                = std::max(drift_energy, rel_diff_scalar(total_energy(l1), e0));
            drift_norm = std::max(drift_norm, rel_diff_scalar(norm(l1), n0));
        }
        this->record("spatial-drift", drift_ip, 1e-12);
        this->record("quadform-drift", drift_quad, 1e-12);
        this->record("modes-drift", drift_modes, 1e-12);
        this->record("norm-drift", drift_norm, 1e-12);
        this->record("energy-drift", drift_energy, 1e-12);

        // project-then-evolve equals evolve-then-project
        double const dt = 1.7 / cfg_.mass.value();
        auto const later = spectrum_to_lattice(evolve_exact(s1, dt));
        double commute = 0;
        for (int sign : {+1, -1})
        {
            auto evolved_part = evolve_signed(
                g, cfg_.mass, project(sign, f1).values, sign, dt);
            commute = std::max(commute,
                               rel_diff(project(sign, later).values, evolved_part));
        }
        this->record("project-commutes", commute, 1e-12);
    }

    void conservation_leapfrog()
    {
        double const m = cfg_.mass.value();
        double const t_end = 10.0 / m;
        double const dt = 0.01 / m;
        auto const f = this->field(1, std::min(this->band(), 8.0 * m));
        double const n0 = norm(f);

        struct Drift
        {
            double max{0};
            //! |fitted slope| * T / max, near 1 for linear growth
            double trend{0};
        };
        auto measure = [&](double step) {
            Drift d;
            auto steps = static_cast<std::size_t>(std::llround(t_end / step));
            std::vector<double> times, devs;
            evolve_leapfrog(f, step, steps, [&](LatticeField const& state) {
                times.push_back(state.time - f.time);
                devs.push_back((norm(state) - n0) / n0);
                d.max = std::max(d.max, std::abs(devs.back()));
            });
            d.trend = secular_trend(times, devs);
            return d;
        };
        auto const coarse = measure(dt);
        auto const fine = measure(0.5 * dt);
        double const c = coarse.max / (dt * dt);
        this->record("norm-drift-bound",
                     coarse.max,
                     1e-3,
                     Comparison::at_most,
                     "C=" + std::to_string(c) + " at dt=0.01/m");
        this->record("norm-drift-order",
                     coarse.max / fine.max,
                     3.5,
                     Comparison::at_least);
        this->record("norm-drift-order-upper", coarse.max / fine.max, 4.5);
        // bounded oscillation about the initial value has no net trend
        this->record("norm-drift-not-secular", coarse.trend, 0.25);
    }

    void a_independence()
    {
        double worst_spatial = 0;
        double worst_quad = 0;
        for (std::uint64_t j = 0; j < 20; ++j)
        {
            auto const f = this->field(j + 1);
            auto const base_s = inner_product_spatial(f, f, ProductParams(1, 0));
            auto const base_q = inner_product_quadform(f, f, ProductParams(1, 0));
            for (double a : {-1.0, -0.5, 0.5, 1.0})
            {
                ProductParams p(1, a);
                worst_spatial = std::max(
                    worst_spatial,
                    std::abs(inner_product_spatial(f, f, p) - base_s)
                        / base_s.real());
                worst_quad = std::max(
                    worst_quad,
                    std::abs(inner_product_quadform(f, f, p) - base_q)
                        / base_q.real());
            }
        }
        this->record("spatial-norm", worst_spatial, 1e-12);
        this->record("quadform-norm", worst_quad, 1e-12);

        double worst_current = 0;
        for (std::uint64_t j = 0; j < 3; ++j)
        {
            auto const f = this->field(100 + j);
            auto const base = current_density(f, f, ProductParams(1, 0));
            auto const mixed = current_density(f, f, ProductParams(1, 0.7));
            double d = rel_diff(base.j0, mixed.j0);
            for (std::size_t ax = 0; ax < base.ji.size(); ++ax)
                d = std::max(d, rel_diff(base.ji[ax], mixed.ji[ax]));
            worst_current = std::max(worst_current, d);
        }
        this->record("current-density", worst_current, 1e-12);
    }

    void positivity()
    {
        double min_norm = std::numeric_limits<double>::infinity();
        std::vector<LatticeField> fields;
        for (std::uint64_t j = 0; j < 100; ++j)
        {
            fields.push_back(this->field(j + 1));
            min_norm = std::min(min_norm, norm(fields.back()));
        }
        this->record("random-norm-min", min_norm, 0.0, Comparison::greater);
        auto const zero = LatticeField::zero(cfg_.grid, cfg_.mass);
        this->record("zero-field-norm", std::abs(norm(zero)), 0.0);

        ProductParams const sym(1.0);
        double cs = 0;
        double symmetry = 0;
        double bilinear = 0;
        for (std::size_t j = 0; j + 1 < 40; j += 2)
        {
            auto const& f1 = fields[j];
            auto const& f2 = fields[j + 1];
            double ip = inner_product_spatial(f1, f2, sym).real();
            double ratio = ip * ip / (norm(f1) * norm(f2));
            cs = std::max(cs, ratio - 1);
            symmetry = std::max(
                symmetry,
                std::abs(ip - inner_product_spatial(f2, f1, sym).real())
                    / std::sqrt(norm(f1) * norm(f2)));

            double const c1 = 1.3, c2 = -0.6;
            auto const& f3 = fields[j + 40];
            RealArray phi(f1.phi.size()), pi(f1.pi.size());
            for (std::size_t i = 0; i < phi.size(); ++i)
            {
                phi[i] = c1 * f1.phi[i] + c2 * f3.phi[i];
                pi[i] = c1 * f1.pi[i] + c2 * f3.pi[i];
            }
            LatticeField combo(f1.grid, f1.mass, f1.time, phi, pi);
            double lhs = inner_product_spatial(combo, f2, sym).real();
            double rhs = c1 * ip + c2 * inner_product_spatial(f3, f2, sym).real();
            double scale = (std::abs(c1) * std::sqrt(norm(f1))
                            + std::abs(c2) * std::sqrt(norm(f3)))
                           * std::sqrt(norm(f2));
            bilinear = std::max(bilinear, std::abs(lhs - rhs) / scale);
        }
        this->record("cauchy-schwarz-excess", std::max(cs, 0.0), 1e-12);
        this->record("symmetric-at-a0", symmetry, 1e-12);
        this->record("bilinear", bilinear, 1e-12);

        // Quadratic form matrix M: eigenvalues 1 +/- a, semi-definite iff
        // |a| <= 1. The |a| > 1 entries are counterexamples that must flip.
        double eig_err = 0;
        double flag_errors = 0;
        for (double a : {0.0, 0.5, -0.5, 1.0, -1.0, std::nextafter(1.0, 2.0),
                         -std::nextafter(1.0, 2.0), 1.5, -1.5})
        {
            auto ev = matrix_m_eigenvalues(a);
            eig_err = std::max({eig_err, std::abs(ev.plus - (1 + a)),
                                std::abs(ev.minus - (1 - a))});
            bool expected = std::abs(a) <= 1;
            flag_errors += ev.positive_semidefinite == expected ? 0 : 1;
        }
        this->record("m-eigenvalues", eig_err, 0.0);
        this->record("m-semidefinite-flag", flag_errors, 0.0);
        auto const bad = matrix_m_eigenvalues(1.5);
        this->record("m-counterexample-negative-eigenvalue",
                     -bad.minus,
                     0.0,
                     Comparison::greater);
    }

    void triple_equivalence()
    {
        double sq = 0, sm = 0, qm = 0, proj = 0;
        for (std::uint64_t j = 0; j < 20; ++j)
        {
            auto const s1 = this->spectrum(2 * j + 1);
            auto const s2 = this->spectrum(2 * j + 2);
            auto const f1 = spectrum_to_lattice(s1);
            auto const f2 = spectrum_to_lattice(s2);
            for (double a : {0.0, 0.5, -0.5})
            {
                ProductParams p(1, a);
                auto vs = inner_product_spatial(f1, f2, p);
                auto vq = inner_product_quadform(f1, f2, p);
                auto vm = inner_product_modes(s1, s2, p);
                auto vp = projector_form_product(f1, f2, p);
                sq = std::max(sq, rel_diff_scalar(vs, vq));
                sm = std::max(sm, rel_diff_scalar(vs, vm));
                qm = std::max(qm, rel_diff_scalar(vq, vm));
                proj = std::max(proj, rel_diff_scalar(vp, vs));
            }
        }
        this->record("spatial-vs-quadform", sq, 1e-10);
        this->record("spatial-vs-modes", sm, 1e-10);
        this->record("quadform-vs-modes", qm, 1e-10);
        this->record("projector-form-vs-spatial", proj, 1e-10);
    }

    void parseval()
    {
        auto const& g = cfg_.grid;
        double modes_vs_spatial = 0;
        for (std::uint64_t j = 0; j < 10; ++j)
        {
            auto const s1 = this->spectrum(2 * j + 1, g.nyquist());
            auto const s2 = this->spectrum(2 * j + 2, g.nyquist());
            ProductParams p(1, 0.5);
            modes_vs_spatial = std::max(
                modes_vs_spatial,
                rel_diff_scalar(inner_product_modes(s1, s2, p),
                                inner_product_spatial(spectrum_to_lattice(s1),
                                                      spectrum_to_lattice(s2),
                                                      p)));
        }
        this->record("modes-vs-spatial", modes_vs_spatial, 1e-10);

        // Round trips on unrestricted data (Nyquist content included).
        auto const s = this->spectrum(50, g.nyquist());
        auto const f = spectrum_to_lattice(s);
        auto const back = lattice_to_spectrum(f);
        this->record("spectrum-round-trip", rel_diff(back.alpha, s.alpha), 1e-12);
        std::mt19937_64 eng(this->seed(52));
        std::uniform_real_distribution<double> unit(-1, 1);
        RealArray phi(g.size()), pi(g.size());
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            phi[i] = unit(eng);
            pi[i] = unit(eng);
        }
        LatticeField raw(g, cfg_.mass, 0.0, phi, pi);
        auto const raw_back = spectrum_to_lattice(lattice_to_spectrum(raw));
        this->record("lattice-round-trip",
                     std::max(rel_diff(raw_back.phi, raw.phi),
                              rel_diff(raw_back.pi, raw.pi)),
                     1e-12);

        // Mode set -> lattice -> spectrum recovers alpha = V w a e^{-i w t}
        // / (2 omega), and the mode-set norm matches the lattice norm when the
        // weight is the lattice momentum cell.
        std::vector<Mode> modes;
        std::vector<std::size_t> flat;
        for (long m : {0L, 1L, -2L, 5L})
        {
            WaveVector k(g.dim(), 0.0);
            std::vector<std::size_t> idx(g.dim(), 0);
            k[0] = 2 * std::numbers::pi * static_cast<double>(m) / g.lengths()[0];
            idx[0] = static_cast<std::size_t>(
                (m + static_cast<long>(g.points()[0]))
                % static_cast<long>(g.points()[0]));
            if (g.dim() > 1)
            {
                k[1] = 2 * std::numbers::pi / g.lengths()[1];
                idx[1] = 1;
            }
            flat.push_back(g.flatten(idx));
            modes.push_back(Mode{k,
                                 Complex(unit(eng), unit(eng)),
                                 g.momentum_cell()});
        }
        double const t = 0.37;
        ModeSet ms(g.dim(), cfg_.mass, t, modes);
        auto const recovered = lattice_to_spectrum(modeset_to_lattice(ms, g));
        ComplexArray expected(g.size());
        for (std::size_t j = 0; j < modes.size(); ++j)
        {
            double const w = ms.omega(j);
            expected[flat[j]] = g.volume() * ms.measure(j) * modes[j].amplitude
                                * std::polar(1.0, -w * t) / (2 * w);
        }
        this->record("modeset-coefficients", rel_diff(recovered.alpha, expected), 1e-12);
        this->record("modeset-norm-vs-lattice",
                     rel_diff_scalar(norm(ms), norm(modeset_to_lattice(ms, g))),
                     1e-12);
    }

    void boost_invariance()
    {
        auto const& g = cfg_.grid;
        std::mt19937_64 eng(this->seed(1));
        std::uniform_real_distribution<double> unit(-1, 1);
        std::vector<Mode> modes;
        for (int j = 0; j < 12; ++j)
        {
            WaveVector k(g.dim());
            for (auto& c : k)
                c = 3 * unit(eng);
            modes.push_back(Mode{k, Complex(unit(eng), unit(eng)),
                                 0.5 + std::abs(unit(eng))});
        }
        ModeSet const ms(g.dim(), cfg_.mass, 0.0, modes);
        double const n0 = norm(ms);
        double worst_norm = 0;
        double worst_mode = 0;
        double worst_shell = 0;
        for (double eta : {0.25, 1.0, -1.3, 2.0})
        {
            for (std::size_t ax = 0; ax < g.dim(); ++ax)
            {
                auto const b = boost_modeset(ms, eta, ax);
                worst_norm = std::max(worst_norm, rel_diff_scalar(norm(b), n0));
                for (std::size_t j = 0; j < modes.size(); ++j)
                {
                    double before = std::norm(ms.modes()[j].amplitude)
                                    * ms.modes()[j].weight / ms.omega(j);
                    double after = std::norm(b.modes()[j].amplitude)
                                   * b.modes()[j].weight / b.omega(j);
                    worst_mode = std::max(worst_mode, rel_diff_scalar(after, before));
                    double w = ms.omega(j);
                    double kz = ms.modes()[j].k[ax];
                    double expect = w * std::cosh(eta) + kz * std::sinh(eta);
                    worst_shell
                        = std::max(worst_shell, rel_diff_scalar(b.omega(j), expect));
                }
            }
        }
        this->record("norm", worst_norm, 1e-12);
        this->record("per-mode-measure", worst_mode, 1e-12);
        this->record("mass-shell", worst_shell, 1e-12);

        double compose = 0;
        auto const two = boost_modeset(boost_modeset(ms, 0.7, 0), 1.1, 0);
        auto const one = boost_modeset(ms, 1.8, 0);
        for (std::size_t j = 0; j < modes.size(); ++j)
        {
            double scale = one.omega(j);
            for (std::size_t ax = 0; ax < g.dim(); ++ax)
            {
                compose = std::max(
                    compose,
                    std::abs(two.modes()[j].k[ax] - one.modes()[j].k[ax]) / scale);
            }
            compose = std::max(compose, rel_diff_scalar(two.modes()[j].weight,
                                                         one.modes()[j].weight));
        }
        this->record("composition", compose, 1e-12);
    }

    void continuity()
    {
        auto const& g = cfg_.grid;
        double worst = 0;
        for (std::uint64_t j = 0; j < 4; ++j)
        {
            auto const f1 = this->field(2 * j + 1);
            auto const f2 = this->field(2 * j + 2);
            for (double a : {0.0, 0.5})
            {
                ProductParams p(1, a);
                worst = std::max(worst, continuity_residual(f1, f2, p).relative);
                worst = std::max(worst, continuity_residual(f1, f1, p).relative);
            }
        }
        this->record("on-shell-residual", worst, 1e-10);

        auto const zero = LatticeField::zero(g, cfg_.mass);
        this->record("zero-field-residual",
                     continuity_residual(zero, zero, ProductParams()).absolute,
                     0.0);

        // Off-shell: phi = cos(k x), pi = cos(2 k x), claimed to move with
        // zero acceleration. Not a solution, so the current is not conserved.
        double const k = 2 * std::numbers::pi / g.lengths()[0];
        RealArray phi(g.size()), pi(g.size()), zeros(g.size());
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            double x = g.position(i)[0];
            phi[i] = std::cos(k * x);
            pi[i] = std::cos(2 * k * x);
        }
        LatticeField off(g, cfg_.mass, 0.0, phi, pi);
        auto kin = Kinematics::with_derivatives(off, zeros, zeros);
        this->record("off-shell-power",
                     continuity_residual(kin, kin, ProductParams()).relative,
                     1e-2,
                     Comparison::at_least);
    }

    void naive_vanishing()
    {
        auto const& g = cfg_.grid;
        double self = 0;
        double min_norm = std::numeric_limits<double>::infinity();
        double antisym = 0;
        for (std::uint64_t j = 0; j < 20; ++j)
        {
            auto const f = this->field(j + 1);
            auto const h = this->field(j + 101);
            self = std::max(self, std::abs(naive_symplectic(f, f)));
            min_norm = std::min(min_norm, norm(f));
            auto q12 = naive_symplectic(f, h);
            auto q21 = naive_symplectic(h, f);
            antisym = std::max(antisym, std::abs(q12 + q21) / std::abs(q12));
        }
        this->record("self-charge", self, 1e-13);
        this->record("norm-on-same-fields", min_norm, 0.0, Comparison::greater);
        this->record("antisymmetry", antisym, 1e-12);

        // Same k, phases 90 degrees apart: naive charge carries
        // 4 omega V |A1||A2| sin(dchi), the inner product cos(dchi) = 0.
        double const amp = 0.5;
        auto const w1 = plane_wave(g, cfg_.mass, 1, Complex(amp, 0));
        auto const w2 = plane_wave(g, cfg_.mass, 1, Complex(0, amp));
        double const k = 2 * std::numbers::pi / g.lengths()[0];
        double const w = cfg_.mass.omega(k * k);
        double const expected = 4 * w * g.volume() * amp * amp;
        auto const q = naive_symplectic(w1, w2);
        this->record("quadrature-phase-naive",
                     rel_diff_scalar(q, Complex(0, expected)),
                     1e-12);
        this->record("quadrature-phase-product",
                     std::abs(inner_product_spatial(w1, w2, ProductParams()))
                         / norm(w1),
                     1e-12);
    }

    void energy_relation()
    {
        auto const& g = cfg_.grid;
        double norm_err = 0;
        double energy_err = 0;
        double closed_err = 0;
        Complex const amp(0.3, 0.4);
        for (long idx : {0L, 1L, 2L})
        {
            auto const f = plane_wave(g, cfg_.mass, idx, amp);
            double k = 2 * std::numbers::pi * static_cast<double>(idx)
                       / g.lengths()[0];
            double w = cfg_.mass.omega(k * k);
            double expected_norm = 4 * w * g.volume() * std::norm(amp);
            double e = total_energy(f);
            norm_err = std::max(norm_err, rel_diff_scalar(norm(f), expected_norm));
            energy_err = std::max(energy_err, rel_diff_scalar(e, 0.5 * w * norm(f)));
            closed_err = std::max(
                closed_err,
                rel_diff_scalar(e, 2 * w * w * g.volume() * std::norm(amp)));
        }
        this->record("single-mode-norm", norm_err, 1e-12);
        this->record("single-mode-energy-vs-norm", energy_err, 1e-12);
        this->record("single-mode-energy", closed_err, 1e-12);

        // Additivity over distinct k and degree-2 homogeneity.
        auto const a = plane_wave(g, cfg_.mass, 1, Complex(0.7, 0.1));
        auto const b = plane_wave(g, cfg_.mass, 3, Complex(-0.2, 0.5));
        RealArray phi(g.size()), pi(g.size()), phi3(g.size()), pi3(g.size());
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            phi[i] = a.phi[i] + b.phi[i];
            pi[i] = a.pi[i] + b.pi[i];
            phi3[i] = 3 * a.phi[i];
            pi3[i] = 3 * a.pi[i];
        }
        LatticeField sum(g, cfg_.mass, 0.0, phi, pi);
        LatticeField scaled(g, cfg_.mass, 0.0, phi3, pi3);
        this->record("energy-additive",
                     rel_diff_scalar(total_energy(sum),
                                     total_energy(a) + total_energy(b)),
                     1e-12);
        this->record("norm-additive",
                     rel_diff_scalar(norm(sum), norm(a) + norm(b)),
                     1e-12);
        this->record("norm-homogeneous",
                     rel_diff_scalar(norm(scaled), 9 * norm(a)),
                     1e-12);

        auto const f = this->field(1);
        auto const contrib = norm_contributions(lattice_to_spectrum(f));
        this->record("mode-contributions-sum",
                     rel_diff_scalar(pairwise_sum(contrib), norm(f)),
                     1e-10);
    }

    void convergence_order()
    {
        double const m = cfg_.mass.value();
        std::vector<double> const dts{0.01 / m, 0.005 / m, 0.0025 / m};
        auto check = [&](std::string const& label, LatticeField const& f) {
            auto table = convergence_study(dts, 1.0 / m, f);
            double lo = std::numeric_limits<double>::infinity();
            double hi = 0;
            for (double r : table.ratios)
            {
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
            std::string note = "fitted order "
                               + std::to_string(table.fitted_order.value_or(0));
            this->record(label + "-ratio-min", lo, 3.5, Comparison::at_least, note);
            this->record(label + "-ratio-max", hi, 4.5);
        };
        check("zero-mode",
              plane_wave(cfg_.grid, cfg_.mass, 0, Complex(0.5, 0)));
        check("random-field",
              this->field(1, std::min(this->band(), 4.0 * m)));
    }
};
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Run the requested verification suites and collect a report.
 *
 * Each suite draws its random inputs from a stream derived from the config
 * seed and the suite name, so results do not depend on which suites run or
 * in what order.
 */
inline Report run_suite(SuiteConfig const& cfg)
{
    auto names = cfg.suites.empty() ? suite_names() : cfg.suites;
    for (auto const& n : names)
    {
        auto const& all = suite_names();
        if (std::find(all.begin(), all.end(), n) == all.end())
            throw std::invalid_argument("unknown suite '" + n + "'");
    }

    std::size_t threads = cfg.threads;
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());

    std::vector<std::vector<CheckResult>> per_suite(names.size());
    for (std::size_t start = 0; start < names.size(); start += threads)
    {
        std::vector<std::future<std::vector<CheckResult>>> batch;
        auto stop = std::min(names.size(), start + threads);
        for (std::size_t i = start; i < stop; ++i)
        {
            batch.push_back(std::async(std::launch::async, [&cfg, &names, i] {
                return detail::SuiteRunner(cfg, names[i]).run();
            }));
        }
        for (std::size_t i = start; i < stop; ++i)
            per_suite[i] = batch[i - start].get();
    }

    Report report{{}, true, cfg.grid, cfg.mass, cfg.seed, names};
    for (auto& checks : per_suite)
    {
        for (auto& c : checks)
        {
            report.pass = report.pass && c.pass;
            report.checks.push_back(std::move(c));
        }
    }
    return report;
}

}  // namespace kgfield

namespace kgfield
{
//---------------------------------------------------------------------------//
/*!
 * Build a suite configuration from JSON:
 *
 *   {"seed": 20060,
 *    "grid": {"dim": 1, "points": 256, "length": 6.283185307179586},
 *    "mass": 1.0,
 *    "suites": ["positivity", ...],
 *    "tolerances": {"positivity/bilinear": 1e-11, "continuity": 1e-9},
 *    "threads": 4}
 *
 * `points` and `length` may be scalars (cubic grid) or per-axis arrays.
 * Every key is optional. Throws std::invalid_argument on malformed input.
 */
inline SuiteConfig config_from_json(nlohmann::json const& j)
{
    try
    {
        SuiteConfig cfg;
        if (!j.is_object())
            throw std::invalid_argument("config must be a JSON object");
        static std::vector<std::string> const known{
            "seed", "grid", "mass", "suites", "tolerances", "threads"};
        for (auto const& [key, value] : j.items())
        {
            if (std::find(known.begin(), known.end(), key) == known.end())
                throw std::invalid_argument("unknown config key '" + key + "'");
        }
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("grid"))
        {
            auto const& g = j.at("grid");
            auto dim = g.value("dim", std::size_t{1});
            auto per_axis = [&](char const* key, auto fallback) {
                using T = decltype(fallback);
                if (!g.contains(key))
                    return std::vector<T>(dim, fallback);
                auto const& v = g.at(key);
                if (v.is_array())
                    return v.get<std::vector<T>>();
                return std::vector<T>(dim, v.get<T>());
            };
            auto points = per_axis("points", std::size_t{256});
            auto lengths = per_axis("length", 2 * std::numbers::pi);
            if (points.size() != dim || lengths.size() != dim)
                throw std::invalid_argument("grid arrays must have dim entries");
            cfg.grid = SpatialGrid(points, lengths);
        }
        if (j.contains("mass"))
            cfg.mass = Mass(j.at("mass").get<double>());
        if (j.contains("suites"))
            cfg.suites = j.at("suites").get<std::vector<std::string>>();
        if (j.contains("tolerances"))
        {
            cfg.tolerances
                = j.at("tolerances").get<std::map<std::string, double>>();
        }
        cfg.threads = j.value("threads", std::size_t{0});
        for (auto const& n : cfg.suites)
        {
            auto const& all = suite_names();
            if (std::find(all.begin(), all.end(), n) == all.end())
                throw std::invalid_argument("unknown suite '" + n + "'");
        }
        return cfg;
    }
    catch (nlohmann::json::exception const& e)
    {
        throw std::invalid_argument(std::string("bad config: ") + e.what());
    }
}

}  // namespace kgfield
