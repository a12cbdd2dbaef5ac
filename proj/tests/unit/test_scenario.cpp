#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fock/errors.hpp"
#include "fock/scenario.hpp"

using namespace fock;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({
  "alpha": 1.0,
  "measures": [ { "name": "g", "type": "gaussian", "beta": 1.0 } ],
  "exponents": [ ["inf", 1] ]
})";

std::string with(const std::string& key_value)
{
    return std::string(R"({
  "alpha": 1.0,
)") + key_value + R"(,
  "measures": [ { "name": "g", "type": "gaussian", "beta": 1.0 } ],
  "exponents": [ ["inf", 1] ]
})";
}

std::string error_of(const std::string& text)
{
    try {
        parse_config_text(text, "cfg.json");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / ("fock_test_" + name);
    fs::remove_all(dir);
    return dir;
}

int run_cli(const std::string& args)
{
    int status = std::system((std::string(FOCKCTL_PATH) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("minimal config parses")
{
    auto cfg = parse_config_text(kMinimal);
    CHECK(cfg.params.alpha() == 1.0);
    REQUIRE(cfg.measures.size() == 1);
    CHECK(cfg.measures[0].name == "g");
    REQUIRE(cfg.exponents.size() == 1);
    CHECK(std::isinf(cfg.exponents[0].first));
    CHECK(cfg.exponents[0].second == 1.0);
}

TEST_CASE("standard config parses")
{
    auto cfg = parse_config(STANDARD_CONFIG);
    CHECK(cfg.measures.size() == 8);
    CHECK(cfg.exponents.size() == 6);
    CHECK(cfg.families.size() == 2);
}

TEST_CASE("config errors name the line and field")
{
    auto neg = error_of(R"({
  "alpha": -1.0,
  "measures": [ { "name": "g", "type": "gaussian", "beta": 1.0 } ],
  "exponents": [ ["inf", 1] ]
})");
    CHECK(neg.find("alpha must be positive") != std::string::npos);
    CHECK(neg.find("cfg.json:2") != std::string::npos);

    auto dup = error_of(R"({
  "alpha": 1.0,
  "measures": [ { "name": "g", "type": "gaussian", "beta": 1.0 },
                { "name": "g", "type": "lebesgue" } ],
  "exponents": [ ["inf", 1] ]
})");
    CHECK(dup.find("duplicate measure name") != std::string::npos);
    CHECK(dup.find(":4") != std::string::npos);

    CHECK(error_of(with(R"("colour": "red")")).find("colour") != std::string::npos);
    CHECK_FALSE(error_of(with(R"("tolerances": { "check": 0 })")).empty());
    CHECK_FALSE(error_of(with(R"("tolerances": { "quadrature": -1e-8 })")).empty());
    CHECK_FALSE(error_of(with(R"("lattice": { "r": 1, "bound_radius": 2 })")).empty());
    CHECK_FALSE(error_of("{ not json").empty());
    CHECK_FALSE(error_of(R"({ "alpha": 1, "measures": [], "exponents": [["inf", 1]] })").empty());
    CHECK_FALSE(error_of(R"({ "alpha": 1, "measures": [ { "name": "g", "type": "cube" } ],
                              "exponents": [["inf", 1]] })").empty());
    CHECK_FALSE(error_of(R"({ "alpha": 1, "measures": [ { "name": "g", "type": "lebesgue" } ],
                              "exponents": [["inf", 1], ["inf", 1]] })").empty());
    CHECK_FALSE(error_of(R"({ "alpha": 1, "measures": [ { "name": "g", "type": "lebesgue" } ],
                              "exponents": [[0.5, 1]] })").empty());
}

TEST_CASE("validate_config rejects a zero tolerance budget")
{
    auto cfg = parse_config_text(kMinimal);
    cfg.check_tol = 0.0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}

TEST_CASE("Berezin profile of a single atom is exp(-t alpha |z|^2 / 2)")
{
    FockParams P(1.0, 1);
    auto atom = MeasureModel::atomic({{CPoint{cplx(0, 0)}, 1.0}});
    ProfileSpec spec;
    auto grid = profile_grid(P, spec);
    REQUIRE(grid.size() > 100);
    std::ostringstream os;
    emit_profiles(P, atom, ProfileKind::berezin, grid, 2.0, os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "re,im,value");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        double re = 0, im = 0, v = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ls(line);
        ls >> re >> c1 >> im >> c2 >> v;
        CHECK(v == doctest::Approx(std::exp(-(re * re + im * im))).epsilon(1e-12));
        ++rows;
    }
    CHECK(rows == grid.size());
}

TEST_CASE("averaging profile of Lebesgue is constant")
{
    FockParams P(1.0, 1);
    auto grid = profile_grid(P, ProfileSpec{});
    std::ostringstream os;
    emit_profiles(P, MeasureModel::lebesgue(), ProfileKind::averaging, grid, 1.0, os);
    std::istringstream in(os.str());
    std::string line, first;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::string value = line.substr(line.rfind(',') + 1);
        if (first.empty()) {
            first = value;
        }
        CHECK(value == first);
    }
    CHECK(std::stod(first) == doctest::Approx(std::numbers::pi));
}

TEST_CASE("profile emission errors")
{
    FockParams P(1.0, 1);
    std::ostringstream os;
    CHECK_THROWS_AS(emit_profiles(P, MeasureModel::lebesgue(), ProfileKind::berezin, {}, 2.0, os),
                    PreconditionError);
    auto grid = profile_grid(P, ProfileSpec{});
    CHECK_THROWS_AS(emit_profiles(P, MeasureModel::lebesgue(), ProfileKind::berezin, grid, 2.0,
                                  fs::path("/nonexistent_dir/x/profile.csv")),
                    Error);
}

TEST_CASE("run_scenario covers every combination and is deterministic")
{
    auto cfg = parse_config_text(R"({
  "alpha": 1.0,
  "measures": [ { "name": "leb", "type": "lebesgue" },
                { "name": "a", "type": "atomic", "atoms": [ { "point": [[0, 0]], "weight": 1 } ] } ],
  "exponents": [ ["inf", 2], [1, "inf"] ],
  "profiles": { "radius": 1.0, "step": 0.5 }
})");
    cfg.workers = 2;
    auto d1 = scratch("run1"), d2 = scratch("run2");
    cfg.output_dir = d1;
    auto r1 = run_scenario(cfg);
    cfg.output_dir = d2;
    auto r2 = run_scenario(cfg);
    CHECK(r1.cases.size() == 4);
    CHECK(r1.passed());
    for (const auto& c : r1.cases) {
        if (c.measure == "leb" && std::isinf(c.p)) {
            REQUIRE(c.report.has_value());
            CHECK_FALSE(c.report->bounded);
            CHECK(c.report->criterion == Criterion::finite_mass);
        }
    }
    std::size_t csvs = 0;
    for (const auto& e : fs::recursive_directory_iterator(d1)) {
        if (e.path().extension() == ".csv") {
            auto rel = fs::relative(e.path(), d1);
            CHECK(slurp(e.path()) == slurp(d2 / rel));
            ++csvs;
        }
    }
    CHECK(csvs >= 5);
    CHECK(fs::exists(d1 / "report.txt"));
}

TEST_CASE("command-line exit codes")
{
    auto dir = scratch("cli");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.json") << with(R"("colour": 1)");
    std::ofstream(dir / "ok.json") << kMinimal;
    CHECK(run_cli("--config " + (dir / "bad.json").string() + " classify") == 2);
    CHECK(run_cli("--config " + (dir / "missing.json").string() + " classify") == 2);
    CHECK(run_cli("--bogus-flag") == 2);
    CHECK(run_cli("--config " + (dir / "ok.json").string() + " --out " + (dir / "o").string() + " classify") == 0);
    CHECK(run_cli("--config " + (dir / "ok.json").string() + " --tol 0 verify") == 2);
    CHECK(run_cli("lattice --r 1 --bound 6") == 0);
}
