// Command-line front end: verify, evolve, spectrum, init.
//
// Exit codes: 0 success/pass, 1 check or physics failure, 2 usage or I/O.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kgfield/kgfield.hpp"

namespace
{
using namespace kgfield;

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_usage = 2;

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::optional<std::size_t> thread_cap()
{
    char const* env = std::getenv("KG_THREADS");
    if (!env || !*env)
        return std::nullopt;
    try
    {
        auto n = std::stoul(env);
        if (n == 0)
            return std::nullopt;
        return n;
    }
    catch (std::exception const&)
    {
        std::cerr << "warning: ignoring malformed KG_THREADS='" << env << "'\n";
        return std::nullopt;
    }
}

//---------------------------------------------------------------------------//
struct VerifyArgs
{
    std::string config;
    std::string out;
    std::string summary;
};

int cmd_verify(VerifyArgs const& args)
{
    SuiteConfig cfg;
    try
    {
        std::ifstream is(args.config);
        if (!is)
        {
            std::cerr << "error: cannot read config " << args.config << '\n';
            return exit_usage;
        }
        cfg = config_from_json(nlohmann::json::parse(is));
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << args.config << ": " << e.what() << '\n';
        return exit_usage;
    }
    if (auto cap = thread_cap())
        cfg.threads = cfg.threads == 0 ? *cap : std::min(cfg.threads, *cap);

    auto const report = run_suite(cfg);
    auto const table = report.summary_table();
    std::cout << table;
    if (!args.out.empty())
    {
        std::ofstream os(args.out);
        os << report.to_json().dump(2) << '\n';
        if (!os)
        {
            std::cerr << "error: cannot write " << args.out << '\n';
            return exit_usage;
        }
    }
    if (!args.summary.empty())
    {
        std::ofstream os(args.summary);
        os << table;
        if (!os)
        {
            std::cerr << "error: cannot write " << args.summary << '\n';
            return exit_usage;
        }
    }
    return report.pass ? exit_pass : exit_fail;
}

//---------------------------------------------------------------------------//
struct EvolveArgs
{
    std::string in;
    std::string out;
    std::string integrator{"exact"};
    double dt{0.01};
    std::size_t steps{0};
    std::string observables;
};

void append_observables(std::ostream& os, LatticeField const& f)
{
    os << format_double(f.time) << ',' << format_double(norm(f)) << ','
       << format_double(total_energy(f)) << ','
       << format_double(naive_symplectic(f, f).imag()) << '\n';
}

int cmd_evolve(EvolveArgs const& args)
{
    LatticeField const initial = load_snapshot(args.in);

    std::ofstream csv;
    if (!args.observables.empty())
    {
        bool fresh = !std::filesystem::exists(args.observables)
                     || std::filesystem::file_size(args.observables) == 0;
        csv.open(args.observables, std::ios::app);
        if (!csv)
            throw FormatError("cannot open " + args.observables);
        if (fresh)
            csv << "time,norm,energy,naive_self_charge\n";
        append_observables(csv, initial);
    }

    LatticeField state = initial;
    if (args.integrator == "exact")
    {
        // Each step is taken from the initial spectrum so rounding does not
        // accumulate
        auto const s0 = lattice_to_spectrum(initial);
        for (std::size_t i = 1; i <= args.steps; ++i)
        {
            state = spectrum_to_lattice(
                evolve_exact(s0, static_cast<double>(i) * args.dt));
            if (csv.is_open())
                append_observables(csv, state);
        }
    }
    else
    {
        double const wmax = omega_max(initial.grid, initial.mass);
        if (args.steps > 0 && !(std::abs(args.dt) * wmax < 2))
            throw StabilityError(args.dt, wmax);
        state = evolve_leapfrog(
            initial, args.dt, args.steps, [&](LatticeField const& s) {
                if (csv.is_open())
                    append_observables(csv, s);
            });
    }
    save_snapshot(args.out, state);
    if (csv.is_open() && !csv)
        throw FormatError("failed writing " + args.observables);
    return exit_pass;
}

//---------------------------------------------------------------------------//
struct SpectrumArgs
{
    std::string in;
    std::string out;
};

int cmd_spectrum(SpectrumArgs const& args)
{
    auto const f = load_snapshot(args.in);
    auto const s = lattice_to_spectrum(f);
    auto const contrib = norm_contributions(s);
    auto const omega = omega_table(f.grid, f.mass);

    std::ofstream os(args.out);
    if (!os)
        throw FormatError("cannot open " + args.out);
    for (std::size_t ax = 0; ax < f.grid.dim(); ++ax)
        os << 'k' << ax << ',';
    os << "omega,alpha_re,alpha_im,norm_contribution\n";
    for (std::size_t i = 0; i < s.alpha.size(); ++i)
    {
        for (double k : f.grid.wavevector(i))
            os << format_double(k) << ',';
        os << format_double(omega[i]) << ',' << format_double(s.alpha[i].real())
           << ',' << format_double(s.alpha[i].imag()) << ','
           << format_double(contrib[i]) << '\n';
    }
    if (!os)
        throw FormatError("failed writing " + args.out);
    std::cout << "total_norm " << format_double(norm(f)) << '\n';
    return exit_pass;
}

//---------------------------------------------------------------------------//
struct InitArgs
{
    std::string out;
    std::string modes;
    std::size_t dim{1};
    std::size_t points{256};
    double length{2 * std::numbers::pi};
    double mass{1};
    std::uint64_t seed{1};
    double band{-1};
};

int cmd_init(InitArgs const& args)
{
    auto grid = SpatialGrid::cubic(args.dim, args.points, args.length);
    LatticeField f = [&] {
        if (!args.modes.empty())
        {
            std::ifstream is(args.modes);
            if (!is)
                throw FormatError("cannot read " + args.modes);
            nlohmann::json j;
            try
            {
                j = nlohmann::json::parse(is);
            }
            catch (nlohmann::json::exception const& e)
            {
                throw FormatError(args.modes + ": " + e.what());
            }
            auto ms = modeset_from_json(j);
            if (ms.dim() != grid.dim())
                throw std::invalid_argument("mode set dimension does not match --dim");
            return modeset_to_lattice(ms, grid);
        }
        double band = args.band < 0 ? 0.25 * grid.nyquist() : args.band;
        return spectrum_to_lattice(
            random_field(grid, Mass(args.mass), args.seed, band));
    }();
    save_snapshot(args.out, f);
    return exit_pass;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Real Klein-Gordon field toolkit"};
    app.require_subcommand(1);

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Run verification suites");
    verify->add_option("--config", va.config, "Suite config (JSON)")->required();
    verify->add_option("--out", va.out, "Report output path (JSON)");
    verify->add_option("--summary", va.summary, "Plain-text summary output path");

    EvolveArgs ea;
    auto* evolve = app.add_subcommand("evolve", "Evolve a snapshot in time");
    evolve->add_option("--in", ea.in, "Input snapshot")->required();
    evolve->add_option("--out", ea.out, "Output snapshot")->required();
    evolve->add_option("--integrator", ea.integrator)
        ->check(CLI::IsMember({"exact", "leapfrog"}));
    evolve->add_option("--dt", ea.dt, "Time step");
    evolve->add_option("--steps", ea.steps, "Number of steps");
    evolve->add_option("--observables", ea.observables,
                       "CSV to append time,norm,energy,naive_self_charge rows");

    SpectrumArgs sa;
    auto* spectrum = app.add_subcommand("spectrum", "Export the mode spectrum as CSV");
    spectrum->add_option("--in", sa.in, "Input snapshot")->required();
    spectrum->add_option("--out", sa.out, "Output CSV")->required();

    InitArgs ia;
    auto* init = app.add_subcommand("init", "Create a snapshot");
    init->add_option("--out", ia.out, "Output snapshot")->required();
    init->add_option("--modes", ia.modes, "Mode set JSON (default: random field)");
    init->add_option("--dim", ia.dim)->check(CLI::Range(1, 3));
    init->add_option("--points", ia.points, "Points per axis");
    init->add_option("--length", ia.length, "Box length per axis");
    init->add_option("--mass", ia.mass);
    init->add_option("--seed", ia.seed);
    init->add_option("--band", ia.band, "Random-field band limit |k|");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::CallForHelp const& e)
    {
        return app.exit(e);
    }
    catch (CLI::CallForAllHelp const& e)
    {
        return app.exit(e);
    }
    catch (CLI::ParseError const& e)
    {
        app.exit(e);
        return exit_usage;
    }

    try
    {
        if (*verify)
            return cmd_verify(va);
        if (*evolve)
            return cmd_evolve(ea);
        if (*spectrum)
            return cmd_spectrum(sa);
        if (*init)
            return cmd_init(ia);
    }
    catch (StabilityError const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_fail;
    }
    catch (ConsistencyError const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_fail;
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
