#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "tlc/config.hpp"
#include "tlc/errors.hpp"
#include "tlc/io.hpp"

using namespace tlc;

namespace {

const char* base_ini = R"([oscillator_a]
gamma1 = 1
gamma2 = 2.5
gamma3 = 1.04
gamma4 = 0.096
drive = 2
drive_phase = 0.5
cutoff = 15

[oscillator_b]
gamma1 = 1
gamma2 = 2.5
gamma3 = 1.04
gamma4 = 0.096
delta = 0.25

[coupling]
g = 0.8
)";

std::string error_path(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const ConfigError& e) {
        return e.key_path();
    }
    return "<no error>";
}

}  // namespace

TEST_CASE("INI and JSON give the same parameters")
{
    const auto ini = ConfigDocument::parse_ini(base_ini);
    const auto json = ConfigDocument::parse_json(R"({
        "oscillator_a": {"gamma1": 1, "gamma2": 2.5, "gamma3": 1.04, "gamma4": 0.096,
                         "drive": 2, "drive_phase": 0.5, "cutoff": 15},
        "oscillator_b": {"gamma1": 1, "gamma2": 2.5, "gamma3": 1.04, "gamma4": 0.096, "delta": 0.25},
        "coupling": {"g": 0.8}})");
    const auto a = read_coupled(ini);
    const auto b = read_coupled(json);
    CHECK(a.coupling == 0.8);
    CHECK(b.coupling == 0.8);
    CHECK(std::abs(a.osc_a.drive - std::polar(2.0, 0.5)) < 1e-15);
    CHECK(a.osc_a.drive == b.osc_a.drive);
    CHECK(a.osc_b.delta == b.osc_b.delta);
    CHECK(a.osc_a.gamma == b.osc_a.gamma);
    CHECK(read_cutoff(ini, "oscillator_a", std::nullopt) == 15);
    CHECK(read_cutoff(ini, "oscillator_a", 30) == 30);
}

TEST_CASE("missing and unknown keys name their path")
{
    CHECK(error_path([] { read_oscillator(ConfigDocument::parse_ini(""), "oscillator_a"); }) == "oscillator_a.gamma1");
    CHECK(error_path([] { ConfigDocument::parse_ini("[oscillator_a]\ngamma9 = 1\n"); }) == "oscillator_a.gamma9");
    CHECK(error_path([] { ConfigDocument::parse_ini("[nonsense]\nx = 1\n"); }).rfind("nonsense", 0) == 0);
    CHECK(error_path([] { ConfigDocument::parse_json(R"({"coupling": {"g": {"re": 1}}})"); }) == "coupling.g");
    CHECK(ConfigDocument::parse_json(R"({"blockade": {"ratios": [0.9, 1, 1.1]}})").get_grid("blockade.ratios").size() == 3);
    const auto doc = ConfigDocument::parse_ini("[coupling]\ng = abc\n");
    CHECK(error_path([&] { doc.get_double("coupling.g"); }) == "coupling.g");
}

TEST_CASE("grids and words")
{
    ConfigDocument doc;
    doc.set("sweep.axis1_values", "0:1:5");
    const auto g = doc.get_grid("sweep.axis1_values");
    REQUIRE(g.size() == 5);
    CHECK(g[1] == 0.25);
    CHECK(g.back() == 1.0);
    doc.set("sweep.axis2_values", "0.1, 0.2 0.4");
    CHECK(doc.get_grid("sweep.axis2_values") == std::vector<double>{0.1, 0.2, 0.4});
    doc.set("sweep.measures", "p2  mi");
    CHECK(doc.get_words("sweep.measures") == std::vector<std::string>{"p2", "mi"});
    CHECK(doc.get_int("output.grid", 720) == 720);
    CHECK(doc.get_bool("sweep.coupled", true));
}

TEST_CASE("initial states")
{
    const FockSpace s(10);
    CHECK(std::abs(initial_state(s, "fock:3", "k")(3) - 1.0) < 1e-15);
    const auto c = initial_state(s, "coherent:0.5,0.5", "k");
    CHECK(c.norm() == doctest::Approx(1.0));
    CHECK(error_path([&] { initial_state(s, "fock:11", "trajectory.initial"); }) == "trajectory.initial");
    CHECK(error_path([&] { initial_state(s, "squeezed:1", "trajectory.initial"); }) == "trajectory.initial");
}

TEST_CASE("numbers round-trip through their text form")
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(u(rng) * 300));
        CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
    }
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
    CHECK(format_number(0.5) == "0.5");
}

TEST_CASE("CSV quoting and parsing")
{
    CsvTable t({"name", "value"});
    t.add_row({"plain", "1"});
    t.add_row({"with,comma", "2"});
    t.add_row({"with \"quote\"", "3"});
    t.add_row({"multi\nline", ""});
    const std::string text = t.to_string();
    CHECK(text.substr(0, 12) == "name,value\r\n");
    CHECK(text.find("\"with \"\"quote\"\"\"") != std::string::npos);
    const auto back = CsvTable::parse(text);
    CHECK(back.header() == t.header());
    CHECK(back.rows() == t.rows());
    CHECK(back.to_string() == text);
    CHECK_THROWS(t.add_row({"short"}));
    CHECK_THROWS(CsvTable::parse("a,b\r\n\"open,1\r\n"));
    CHECK_THROWS(CsvTable::parse("a,b\r\n1,2,3\r\n"));
}

TEST_CASE("validate detects non-canonical files")
{
    const auto dir = std::filesystem::temp_directory_path() / "tlc_io_test";
    std::filesystem::create_directories(dir);
    const std::string good = (dir / "good.csv").string();
    CsvTable t({"x", "y"});
    t.add_row({format_number(0.1), format_number(1e-300)});
    t.write(good);
    CHECK(validate_file(good).ok);

    const std::string lf = (dir / "lf.csv").string();
    write_text(lf, "x,y\n1,2\n");
    CHECK_FALSE(validate_file(lf).ok);

    const std::string lossy = (dir / "lossy.csv").string();
    write_text(lossy, "x\r\n0.10\r\n");
    const auto rep = validate_file(lossy);
    CHECK_FALSE(rep.ok);
    CHECK(rep.message.find("round-trip") != std::string::npos);

    const std::string js = (dir / "meta.json").string();
    write_text(js, "{\n  \"a\": 1\n}\n");
    CHECK(validate_file(js).ok);
    write_text(js, "{\"a\": 1}");
    CHECK_FALSE(validate_file(js).ok);
    std::filesystem::remove_all(dir);
}
