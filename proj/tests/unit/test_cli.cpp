#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "tlc/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args)
{
    const std::string cmd = std::string(TLCSIM_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 512> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe)) {
        out += buf.data();
    }
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("tlcsim_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const char* tlc_ini = R"([oscillator_a]
gamma1 = 1
gamma2 = 2.5
gamma3 = 1.04
gamma4 = 0.096
drive = 1
cutoff = 20
)";

}  // namespace

TEST_CASE("missing key exits with status 2 and names it")
{
    const auto dir = scratch("empty");
    tlc::write_text((dir / "empty.ini").string(), "");
    const auto r = run("--config " + (dir / "empty.ini").string() + " --out " + dir.string() + " steady");
    CHECK(r.code == 2);
    CHECK(r.out.find("oscillator_a.gamma1") != std::string::npos);
}

TEST_CASE("unknown key exits with status 2")
{
    const auto dir = scratch("unknown");
    tlc::write_text((dir / "bad.ini").string(), std::string(tlc_ini) + "colour = red\n");
    const auto r = run("--config " + (dir / "bad.ini").string() + " steady");
    CHECK(r.code == 2);
    CHECK(r.out.find("oscillator_a.colour") != std::string::npos);
}

TEST_CASE("meanfield prints the radii")
{
    const auto dir = scratch("meanfield");
    tlc::write_text((dir / "s1.ini").string(),
                    "[oscillator_a]\ngamma1 = 1\ngamma2 = 0.539\ngamma3 = 0.0264\ngamma4 = 0.000244\n");
    const auto r = run("--config " + (dir / "s1.ini").string() + " --out " + dir.string() + " meanfield");
    CHECK(r.code == 0);
    CHECK(r.out.find("r1=1.000 rc=3.995 r2=8.012") != std::string::npos);
}

TEST_CASE("phase output locks at -pi/2 and validates")
{
    const auto dir = scratch("phase");
    tlc::write_text((dir / "tlc.ini").string(), tlc_ini);
    const auto r = run("--config " + (dir / "tlc.ini").string() + " --out " + dir.string() + " phase");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("argmax=-1.5708") != std::string::npos);

    std::string files;
    int count = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".csv" || e.path().extension() == ".json") {
            files += " " + e.path().string();
            ++count;
        }
    }
    CHECK(count >= 2);
    const auto v = run("validate" + files);
    CHECK(v.code == 0);
    CHECK(v.out.find("FAIL") == std::string::npos);

    const auto meta = nlohmann::json::parse(tlc::read_text((dir / "phase.meta.json").string()));
    CHECK(meta["subcommand"] == "phase");
    CHECK(meta.contains("seed"));
    CHECK(meta.contains("tolerances"));
}

TEST_CASE("repeated runs write identical CSV files")
{
    const auto d1 = scratch("rep1");
    const auto d2 = scratch("rep2");
    tlc::write_text((d1 / "tlc.ini").string(), tlc_ini);
    REQUIRE(run("--config " + (d1 / "tlc.ini").string() + " --out " + d1.string() + " steady").code == 0);
    REQUIRE(run("--config " + (d1 / "tlc.ini").string() + " --out " + d2.string() + " steady").code == 0);
    int compared = 0;
    for (const auto& e : fs::directory_iterator(d1)) {
        if (e.path().extension() == ".csv") {
            CHECK(tlc::read_text(e.path().string()) == tlc::read_text((d2 / e.path().filename()).string()));
            ++compared;
        }
    }
    CHECK(compared > 0);
}

TEST_CASE("unknown subcommand is a usage error")
{
    CHECK(run("frobnicate").code != 0);
}
