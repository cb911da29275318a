#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "field.hpp"

namespace kgfield
{
//! Malformed or unreadable snapshot / mode-set file.
class FormatError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

namespace detail
{
inline void put_u32(std::ostream& os, std::uint32_t v)
{
    std::array<char, 4> b;
    for (int i = 0; i < 4; ++i)
        b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(b.data(), b.size());
}

inline void put_f64(std::ostream& os, double v)
{
    auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> b;
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    os.write(b.data(), b.size());
}

inline std::uint32_t get_u32(std::istream& is)
{
    std::array<unsigned char, 4> b;
    if (!is.read(reinterpret_cast<char*>(b.data()), b.size()))
        throw FormatError("snapshot truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

inline double get_f64(std::istream& is)
{
    std::array<unsigned char, 8> b;
    if (!is.read(reinterpret_cast<char*>(b.data()), b.size()))
        throw FormatError("snapshot truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Binary snapshot of a LatticeField, all values little-endian:
 *
 *   "KGF1" | u32 dim | u32 points[dim] | f64 lengths[dim] | f64 mass
 *   | f64 time | f64 phi[N] | f64 pi[N]
 *
 * Arrays are row-major, last axis fastest.
 */
inline void write_snapshot(std::ostream& os, LatticeField const& f)
{
    os.write("KGF1", 4);
    detail::put_u32(os, static_cast<std::uint32_t>(f.grid.dim()));
    for (auto n : f.grid.points())
        detail::put_u32(os, static_cast<std::uint32_t>(n));
    for (auto l : f.grid.lengths())
        detail::put_f64(os, l);
    detail::put_f64(os, f.mass.value());
    detail::put_f64(os, f.time);
    for (double v : f.phi)
        detail::put_f64(os, v);
    for (double v : f.pi)
        detail::put_f64(os, v);
}

inline LatticeField read_snapshot(std::istream& is)
{
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), magic.size())
        || std::memcmp(magic.data(), "KGF1", 4) != 0)
    {
        throw FormatError("not a KGF1 snapshot");
    }
    auto dim = detail::get_u32(is);
    if (dim < 1 || dim > 3)
        throw FormatError("snapshot dimension must be 1..3");
    std::vector<std::size_t> points(dim);
    std::vector<double> lengths(dim);
    for (auto& n : points)
        n = detail::get_u32(is);
    for (auto& l : lengths)
        l = detail::get_f64(is);
    double mass = detail::get_f64(is);
    double time = detail::get_f64(is);
    try
    {
        SpatialGrid grid(points, lengths);
        RealArray phi(grid.size());
        RealArray pi(grid.size());
        for (auto& v : phi)
            v = detail::get_f64(is);
        for (auto& v : pi)
            v = detail::get_f64(is);
        return LatticeField(grid, Mass(mass), time, std::move(phi),
                            std::move(pi));
    }
    catch (std::invalid_argument const& e)
    {
        throw FormatError(std::string("invalid snapshot header: ") + e.what());
    }
}

inline void save_snapshot(std::string const& path, LatticeField const& f)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw FormatError("cannot open " + path + " for writing");
    write_snapshot(os, f);
    if (!os)
        throw FormatError("failed writing " + path);
}

inline LatticeField load_snapshot(std::string const& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw FormatError("cannot open " + path);
    return read_snapshot(is);
}

//---------------------------------------------------------------------------//
/*!
 * Mode sets as JSON:
 *
 *   {"dim": 1, "mass": 1.0, "time": 0.0,
 *    "modes": [{"k": [1.0], "amplitude": [0.5, 0.0], "weight": 1.0}]}
 *
 * `amplitude` is [re, im]; `weight` is the momentum-space cell d^d k.
 */
inline nlohmann::json modeset_to_json(ModeSet const& ms)
{
    nlohmann::json modes = nlohmann::json::array();
    for (auto const& m : ms.modes())
    {
        modes.push_back({{"k", m.k},
                         {"amplitude", {m.amplitude.real(), m.amplitude.imag()}},
                         {"weight", m.weight}});
    }
    return {{"dim", ms.dim()},
            {"mass", ms.mass().value()},
            {"time", ms.time()},
            {"modes", modes}};
}

inline ModeSet modeset_from_json(nlohmann::json const& j)
{
    try
    {
        auto dim = j.at("dim").get<std::size_t>();
        std::vector<Mode> modes;
        for (auto const& jm : j.at("modes"))
        {
            Mode m;
            m.k = jm.at("k").get<WaveVector>();
            auto amp = jm.at("amplitude").get<std::vector<double>>();
            if (amp.size() != 2)
                throw FormatError("mode amplitude must be [re, im]");
            m.amplitude = Complex(amp[0], amp[1]);
            m.weight = jm.value("weight", 1.0);
            modes.push_back(std::move(m));
        }
        return ModeSet(dim, Mass(j.at("mass").get<double>()),
                       j.value("time", 0.0), std::move(modes));
    }
    catch (nlohmann::json::exception const& e)
    {
        throw FormatError(std::string("bad mode set JSON: ") + e.what());
    }
    catch (std::invalid_argument const& e)
    {
        throw FormatError(std::string("bad mode set: ") + e.what());
    }
}

}  // namespace kgfield
