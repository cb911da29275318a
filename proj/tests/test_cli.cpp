#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "kgfield/io.hpp"
#include "kgfield/products.hpp"

namespace fs = std::filesystem;

namespace
{
class CliTest : public ::testing::Test
{
  protected:
    fs::path dir;

    void SetUp() override
    {
        auto const* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path()
              / (std::string("kgfield_cli_") + info->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string path(std::string const& name) const
    {
        return (dir / name).string();
    }

    int run(std::string const& args) const
    {
        std::string cmd = std::string(KGFIELD_CLI_PATH) + " " + args + " > "
                          + path("stdout.txt") + " 2> " + path("stderr.txt");
        int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string read(std::string const& name) const
    {
        std::ifstream is(path(name), std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    void write(std::string const& name, std::string const& text) const
    {
        std::ofstream(path(name)) << text;
    }

    std::vector<std::vector<std::string>> csv(std::string const& name) const
    {
        std::vector<std::vector<std::string>> rows;
        std::istringstream is(this->read(name));
        std::string line;
        while (std::getline(is, line))
        {
            std::vector<std::string> cells;
            std::istringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ','))
                cells.push_back(cell);
            rows.push_back(cells);
        }
        return rows;
    }

    //! Single mode k = 1, A = 1/2 in field-amplitude units on N = 64.
    void write_single_mode(std::string const& name) const
    {
        double w = std::sqrt(2.0);
        double weight = 2 * w * 2 * std::numbers::pi;
        std::ostringstream j;
        j.precision(17);
        j << R"({"dim": 1, "mass": 1.0, "modes": [{"k": [1.0], "amplitude": [0.5, 0.0], "weight": )"
          << weight << "}]}";
        write(name, j.str());
    }
};
}  // namespace

TEST_F(CliTest, UsageErrors)
{
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("bogus"), 2);
    EXPECT_EQ(run("evolve --in x"), 2);
    EXPECT_EQ(run("--help"), 0);
}

TEST_F(CliTest, VerifyExitCodes)
{
    EXPECT_EQ(run("verify --config " + path("missing.json")), 2);
    write("broken.json", "{ not json");
    EXPECT_EQ(run("verify --config " + path("broken.json")), 2);
    write("unknown.json", R"({"suites": ["nope"]})");
    EXPECT_EQ(run("verify --config " + path("unknown.json")), 2);

    write("impossible.json", R"({"suites": ["parseval"], "tolerances": {"*": 1e-20}})");
    EXPECT_EQ(run("verify --config " + path("impossible.json") + " --out "
                  + path("r.json")),
              1);
    auto report = nlohmann::json::parse(read("r.json"));
    EXPECT_FALSE(report["pass"].get<bool>());

    std::string cfg = std::string(KGFIELD_SOURCE_DIR) + "/configs/default.json";
    EXPECT_EQ(run("verify --config " + cfg + " --out " + path("ok.json")
                  + " --summary " + path("ok.txt")),
              0);
    EXPECT_TRUE(nlohmann::json::parse(read("ok.json"))["pass"].get<bool>());
    EXPECT_NE(read("ok.txt").find("ALL PASS"), std::string::npos);
}

TEST_F(CliTest, VerifyReportDeterministic)
{
    write("cfg.json", R"({"suites": ["triple-equivalence", "continuity"]})");
    ASSERT_EQ(run("verify --config " + path("cfg.json") + " --out " + path("a.json")), 0);
    ASSERT_EQ(run("verify --config " + path("cfg.json") + " --out " + path("b.json")), 0);
    EXPECT_EQ(read("a.json"), read("b.json"));
}

TEST_F(CliTest, EvolveZeroStepsIsBitIdentical)
{
    ASSERT_EQ(run("init --out " + path("in.kgf") + " --points 64 --seed 3"), 0);
    for (auto integ : {"exact", "leapfrog"})
    {
        ASSERT_EQ(run(std::string("evolve --in ") + path("in.kgf") + " --out "
                      + path("out.kgf") + " --integrator " + integ
                      + " --steps 0"),
                  0);
        EXPECT_EQ(read("in.kgf"), read("out.kgf")) << integ;
    }
}

TEST_F(CliTest, ExactEvolutionKeepsNormConstant)
{
    ASSERT_EQ(run("init --out " + path("in.kgf") + " --points 128 --seed 4"), 0);
    ASSERT_EQ(run("evolve --in " + path("in.kgf") + " --out " + path("out.kgf")
                  + " --integrator exact --dt 0.1 --steps 50 --observables "
                  + path("obs.csv")),
              0);
    auto rows = csv("obs.csv");
    ASSERT_EQ(rows.size(), 52u);  // header + initial + 50 steps
    EXPECT_EQ(rows[0], (std::vector<std::string>{"time", "norm", "energy",
                                                 "naive_self_charge"}));
    double n0 = std::stod(rows[1][1]);
    double e0 = std::stod(rows[1][2]);
    for (std::size_t i = 1; i < rows.size(); ++i)
    {
        EXPECT_NEAR(std::stod(rows[i][1]), n0, 1e-12 * n0);
        EXPECT_NEAR(std::stod(rows[i][2]), e0, 1e-12 * e0);
        EXPECT_EQ(std::stod(rows[i][3]), 0.0);
    }
    EXPECT_NEAR(std::stod(rows.back()[0]), 5.0, 1e-12);
    auto out = kgfield::load_snapshot(path("out.kgf"));
    EXPECT_NEAR(out.time, 5.0, 1e-12);

    // appending keeps the single header
    ASSERT_EQ(run("evolve --in " + path("out.kgf") + " --out " + path("out2.kgf")
                  + " --steps 2 --dt 0.1 --observables " + path("obs.csv")),
              0);
    auto more = csv("obs.csv");
    EXPECT_EQ(more.size(), 55u);
    EXPECT_EQ(more[52][1], rows.back()[1]);
}

TEST_F(CliTest, LeapfrogNormOscillatesInSmallBand)
{
    ASSERT_EQ(run("init --out " + path("in.kgf") + " --points 64 --seed 5 --band 4"), 0);
    ASSERT_EQ(run("evolve --in " + path("in.kgf") + " --out " + path("out.kgf")
                  + " --integrator leapfrog --dt 0.01 --steps 500 --observables "
                  + path("obs.csv")),
              0);
    auto rows = csv("obs.csv");
    double n0 = std::stod(rows[1][1]);
    double worst = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        worst = std::max(worst, std::abs(std::stod(rows[i][1]) - n0) / n0);
    EXPECT_GT(worst, 0);
    // (omega dt)^2 with omega <= sqrt(17)
    EXPECT_LT(worst, 17 * 0.01 * 0.01);
}

TEST_F(CliTest, LeapfrogStabilityViolationExitsOne)
{
    ASSERT_EQ(run("init --out " + path("in.kgf") + " --points 256"), 0);
    EXPECT_EQ(run("evolve --in " + path("in.kgf") + " --out " + path("out.kgf")
                  + " --integrator leapfrog --dt 0.05 --steps 3"),
              1);
    EXPECT_NE(read("stderr.txt").find("omega_max"), std::string::npos)
        << read("stderr.txt");
    EXPECT_FALSE(fs::exists(path("out.kgf")));
}

TEST_F(CliTest, EvolveRejectsBadInput)
{
    EXPECT_EQ(run("evolve --in " + path("none.kgf") + " --out " + path("o.kgf")), 2);
    write("junk.kgf", "hello");
    EXPECT_EQ(run("evolve --in " + path("junk.kgf") + " --out " + path("o.kgf")), 2);
    ASSERT_EQ(run("init --out " + path("in.kgf") + " --points 16"), 0);
    EXPECT_EQ(run("evolve --in " + path("in.kgf") + " --out " + path("o.kgf")
                  + " --integrator euler"),
              2);
}

TEST_F(CliTest, SpectrumSingleModeHasOneRow)
{
    write_single_mode("mode.json");
    ASSERT_EQ(run("init --modes " + path("mode.json") + " --points 64 --out "
                  + path("m.kgf")),
              0);
    ASSERT_EQ(run("spectrum --in " + path("m.kgf") + " --out " + path("s.csv")), 0);
    auto rows = csv("s.csv");
    EXPECT_EQ(rows[0], (std::vector<std::string>{"k0", "omega", "alpha_re",
                                                 "alpha_im", "norm_contribution"}));
    ASSERT_EQ(rows.size(), 65u);
    std::size_t nonzero = 0;
    double total = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
    {
        double c = std::stod(rows[i][4]);
        total += c;
        if (c > 1e-20)
        {
            ++nonzero;
            EXPECT_EQ(std::stod(rows[i][0]), 1.0);
            EXPECT_NEAR(std::stod(rows[i][1]), std::sqrt(2.0), 1e-15);
        }
    }
    EXPECT_EQ(nonzero, 1u);
    EXPECT_NEAR(total, 2 * std::numbers::pi * std::numbers::sqrt2, 1e-12);
    auto out = read("stdout.txt");
    double reported = std::stod(out.substr(out.find(' ') + 1));
    EXPECT_NEAR(total, reported, 1e-10 * reported);
}

TEST_F(CliTest, SpectrumSumsToNormAndZeroFieldIsZero)
{
    ASSERT_EQ(run("init --out " + path("r.kgf") + " --dim 2 --points 16 --seed 8"), 0);
    ASSERT_EQ(run("spectrum --in " + path("r.kgf") + " --out " + path("s.csv")), 0);
    auto rows = csv("s.csv");
    EXPECT_EQ(rows[0].size(), 6u);
    double total = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        total += std::stod(rows[i][5]);
    double reference = kgfield::norm(kgfield::load_snapshot(path("r.kgf")));
    EXPECT_NEAR(total, reference, 1e-10 * reference);

    auto zero = kgfield::LatticeField::zero(kgfield::SpatialGrid::cubic(1, 8, 1.0),
                                            kgfield::Mass(1));
    kgfield::save_snapshot(path("z.kgf"), zero);
    ASSERT_EQ(run("spectrum --in " + path("z.kgf") + " --out " + path("z.csv")), 0);
    auto zrows = csv("z.csv");
    for (std::size_t i = 1; i < zrows.size(); ++i)
        EXPECT_EQ(std::stod(zrows[i][4]), 0.0);
}

TEST_F(CliTest, SpectrumUnreadableSnapshotExitsTwo)
{
    EXPECT_EQ(run("spectrum --in " + path("nope.kgf") + " --out " + path("s.csv")), 2);
}

TEST_F(CliTest, InitModesValidation)
{
    write("bad.json", R"({"dim": 1, "mass": 1, "modes": [{"k": [0.5], "amplitude": [1, 0]}]})");
    EXPECT_EQ(run("init --modes " + path("bad.json") + " --points 16 --out " + path("x.kgf")),
              2);
    EXPECT_NE(read("stderr.txt").find("admissible"), std::string::npos);
    EXPECT_EQ(run("init --modes " + path("missing.json") + " --out " + path("x.kgf")), 2);
}
