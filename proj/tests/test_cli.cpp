// test_cli.cpp

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "commands.hpp"
#include "doctest.h"
#include "nearfield/errors.hpp"

using namespace nearfield::cli;
namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& tag) {
        dir = fs::temp_directory_path() / ("nearfield_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    fs::path operator/(const std::string& name) const { return dir / name; }
};

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(path));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string header(const fs::path& path) { return slurp(path).substr(0, slurp(path).find('\n')); }

double num(const std::string& s) { return std::stod(s); }

}  // namespace

TEST_CASE("grid specification") {
    const auto log_grid = GridSpec{1.0, 100.0, 3, true}.values();
    REQUIRE(log_grid.size() == 3);
    CHECK(log_grid[0] == 1.0);
    CHECK(log_grid[1] == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(log_grid[2] == 100.0);
    CHECK(GridSpec{0.0, 1.0, 5, false}.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(GridSpec{2.0, 2.0, 1, true}.values() == std::vector<double>{2.0});
    CHECK_THROWS_AS((GridSpec{0.0, 1.0, 4, true}.values()), nearfield::ConfigError);
    CHECK_THROWS_AS((GridSpec{1.0, 1.0, 4, false}.values()), nearfield::ConfigError);
    CHECK_THROWS_AS((GridSpec{2.0, 1.0, 4, false}.values()), nearfield::ConfigError);
    CHECK_THROWS_AS((GridSpec{1.0, 2.0, 0, false}.values()), nearfield::ConfigError);
}

TEST_CASE("csv headers") {
    Scratch s("headers");
    const std::string out = s.dir.string();
    REQUIRE(invoke({"fig2", "--out", out, "--z-points", "4"}).code == 0);
    REQUIRE(invoke({"fig4", "--out", out, "--z-points", "4"}).code == 0);
    REQUIRE(invoke({"fig5", "--out", out, "--f-points", "4"}).code == 0);
    REQUIRE(invoke({"fig6", "--out", out, "--s-points", "4"}).code == 0);
    REQUIRE(invoke({"fig7", "--out", out, "--particles", "200", "--s-points", "3"}).code == 0);
    REQUIRE(invoke({"transport", "--out", out, "--particles", "200", "--t-points", "3"}).code == 0);

    const std::string ion = "z_m,gamma_plus,gamma_minus,Gamma_0to1";
    for (auto name : {"fig2_exact", "fig2_asymptotic", "fig2_johnson"}) {
        CHECK(header(s / (std::string(name) + ".csv")) == ion);
    }
    for (auto name : {"fig4_exact", "fig4_asymptotic", "fig4_blackbody"}) {
        CHECK(header(s / (std::string(name) + ".csv")) == "z_m,larmor_rad_s,Gamma_flip");
    }
    CHECK(header(s / "fig5_exact.csv") == "z_m,omega_rad_s,Sxx,Syy,Szz,units,kind,path");
    CHECK(header(s / "fig6.csv") == "s_m,Cxx,Cyy,Czz,path");
    const std::string coherence = "t_s,s_m,re_gamma,im_gamma,stderr";
    CHECK(header(s / "fig7_analytic.csv") == coherence);
    CHECK(header(s / "fig7_mc.csv") == coherence);
    CHECK(header(s / "transport_coherence.csv") == coherence);
    CHECK(header(s / "transport_moments.csv") == "t_s,dp2,dr2,stderr_dp2,stderr_dr2");
}

TEST_CASE("fig2 default run") {
    Scratch s("fig2");
    const auto r = invoke({"fig2", "--out", s.dir.string(), "--format", "svg"});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(s / "fig2.svg"));
    CHECK(slurp(s / "fig2.svg").rfind("<svg", 0) == 0);

    const auto exact = read_csv(s / "fig2_exact.csv");
    const auto asym = read_csv(s / "fig2_asymptotic.csv");
    const auto johnson = read_csv(s / "fig2_johnson.csv");
    REQUIRE(exact.size() == 61);
    CHECK(num(exact[1][0]) == doctest::Approx(1e-7));
    CHECK(num(exact.back()[0]) == doctest::Approx(1e-4));

    // extreme near field: the first decade above 0.1 um
    for (std::size_t i = 1; i <= 20; ++i) {
        CHECK(num(asym[i][3]) / num(exact[i][3]) == doctest::Approx(1.0).epsilon(0.25));
    }
    // Johnson reference: slope -2
    for (std::size_t i = 2; i < johnson.size(); ++i) {
        const double slope = std::log(num(johnson[i][3]) / num(johnson[i - 1][3])) /
                             std::log(num(johnson[i][0]) / num(johnson[i - 1][0]));
        CHECK(slope == doctest::Approx(-2.0).epsilon(1e-9));
    }
}

TEST_CASE("fig7 curves") {
    Scratch s("fig7");
    REQUIRE(invoke({"fig7", "--out", s.dir.string(), "--particles", "4000"}).code == 0);
    const auto analytic = read_csv(s / "fig7_analytic.csv");
    const auto mc = read_csv(s / "fig7_mc.csv");
    REQUIRE(analytic.size() == 1 + 5 * 41);
    REQUIRE(mc.size() == analytic.size());
    for (std::size_t i = 1; i < analytic.size(); ++i) {
        const double t = num(analytic[i][0]);
        const double re = num(analytic[i][2]);
        if (t == 0.0) CHECK(re == doctest::Approx(1.0));
        const double se = num(mc[i][4]);
        CHECK(std::abs(num(mc[i][2]) - re) <= 3.0 * se + 1e-12);
    }
    // large-s plateau near exp(-gamma t); at s = 10 ell the Lorentzian C is 1/101
    const auto& last = analytic.back();
    CHECK(num(last[2]) == doctest::Approx(std::exp(-5.0 * (1.0 - 1.0 / 101.0))).epsilon(1e-6));
    CHECK(num(last[2]) == doctest::Approx(std::exp(-5.0)).epsilon(0.1));
}

TEST_CASE("reruns are byte-identical") {
    Scratch a("det_a");
    Scratch b("det_b");
    for (const auto* dir : {&a, &b}) {
        const std::string out = dir->dir.string();
        REQUIRE(invoke({"fig2", "--out", out, "--z-points", "10"}).code == 0);
        REQUIRE(invoke({"fig7", "--out", out, "--particles", "2000", "--seed", "17"}).code == 0);
        REQUIRE(invoke({"transport", "--out", out, "--dim", "2", "--particles", "2000",
                        "--seed", "17", "--force", "1e-27,2e-27"}).code == 0);
    }
    for (const auto& entry : fs::directory_iterator(a.dir)) {
        const auto name = entry.path().filename().string();
        CHECK_MESSAGE(slurp(entry.path()) == slurp(b / name), name);
    }
    // a different seed changes the Monte Carlo table
    Scratch c("det_c");
    REQUIRE(invoke({"fig7", "--out", c.dir.string(), "--particles", "2000", "--seed", "18"}).code == 0);
    CHECK(slurp(a / "fig7_mc.csv") != slurp(c / "fig7_mc.csv"));
    CHECK(slurp(a / "fig7_analytic.csv") == slurp(c / "fig7_analytic.csv"));
}

TEST_CASE("config file overrides flags") {
    Scratch s("config");
    {
        std::ofstream cfg(s / "run.cfg");
        cfg << "# comment line\n"
            << "z-points = 3\n"
            << "temperature = 4   # trailing comment\n"
            << "\n"
            << "format = json\n";
    }
    const auto r = invoke({"rates", "--z-points", "7", "--temperature", "300", "--out",
                           s.dir.string(), "--config", (s / "run.cfg").string()});
    REQUIRE(r.code == 0);
    const auto text = slurp(s / "rates.json");
    CHECK(text.find("\"temperature_K\": 4") != std::string::npos);
    CHECK(text.find("rates_ion_exact") != std::string::npos);

    // without the config the flags apply
    REQUIRE(invoke({"rates", "--z-points", "2", "--path", "exact", "--out", s.dir.string()}).code == 0);
    CHECK(read_csv(s / "rates_ion_exact.csv").size() == 3);

    std::ofstream(s / "bad.cfg") << "z-points 3\n";
    CHECK(invoke({"rates", "--config", (s / "bad.cfg").string(), "--out", s.dir.string()}).code == 2);
    std::ofstream(s / "unknown.cfg") << "no-such-key = 1\n";
    CHECK(invoke({"rates", "--config", (s / "unknown.cfg").string(), "--out", s.dir.string()}).code == 2);
    CHECK(invoke({"rates", "--config", (s / "missing.cfg").string()}).code == 2);
}

TEST_CASE("exit codes") {
    Scratch s("codes");
    const std::string out = s.dir.string();
    CHECK(invoke({"--help"}).code == 0);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"fig3"}).code == 2);
    CHECK(invoke({"fig2", "--bogus"}).code == 2);
    CHECK(invoke({"fig2", "--material", "unobtanium", "--out", out}).code == 2);
    CHECK(invoke({"fig2", "--z-min", "-1", "--out", out}).code == 2);
    CHECK(invoke({"fig2", "--temperature", "0", "--out", out}).code == 2);
    CHECK(invoke({"fig2", "--format", "xml", "--out", out}).code == 2);
    CHECK(invoke({"transport", "--dim", "3", "--out", out}).code == 2);
    CHECK(invoke({"transport", "--dim", "1", "--force", "0,1e-27", "--out", out}).code == 2);
    CHECK(invoke({"transport", "--ell", "-1", "--out", out}).code == 2);
    CHECK(invoke({"fig2", "--material-file", (s / "none.txt").string(), "--out", out}).code == 2);

    std::ofstream(s / "blocker") << "file, not a directory\n";
    const auto io = invoke({"fig2", "--z-points", "2", "--out", (s / "blocker" / "sub").string()});
    CHECK(io.code == 1);
    CHECK(io.err.find("blocker") != std::string::npos);

    const auto stuck = invoke({"spectrum", "--path", "exact", "--z-points", "1", "--tol", "1e-16",
                               "--out", out});
    CHECK(stuck.code == 3);
}

TEST_CASE("exit code mapping") {
    CHECK(exit_code(nearfield::ConfigError("x")) == 2);
    CHECK(exit_code(nearfield::DomainError("x")) == 2);
    CHECK(exit_code(nearfield::ConvergenceError("x", {}, 0.0)) == 3);
    CHECK(exit_code(std::runtime_error("x")) == 1);
}

TEST_CASE("custom material table") {
    Scratch s("material");
    std::ofstream(s / "m.txt") << "steel.rho = 7e-7\n";
    const auto r = invoke({"rates", "--material-file", (s / "m.txt").string(), "--material", "steel",
                           "--format", "json", "--z-points", "2", "--out", s.dir.string()});
    REQUIRE(r.code == 0);
    CHECK(slurp(s / "rates.json").find("\"steel\"") != std::string::npos);
}
